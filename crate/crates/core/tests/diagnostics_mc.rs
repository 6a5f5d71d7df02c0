use cog_latent::diagnostics::{
    check_cog_distribution, check_uncorrected_distribution, estimate_slerp_beta_ci,
    quantile_sorted, sample_latents,
};
use cog_latent::{Error, GaussianSpec};

#[test]
fn equal_weight_midpoint_passes_when_corrected() {
    let spec = GaussianSpec::standard(1024).unwrap();
    let r = check_cog_distribution(&spec, &[0.5, 0.5], 20_000, 4).unwrap();
    assert!(r.passed, "{}", r.to_kv());
    assert!((r.beta - 0.5).abs() < 1e-15);
}

#[test]
fn selector_weights_pass() {
    let spec = GaussianSpec::isotropic(64, -1.0, 3.0).unwrap();
    let r = check_cog_distribution(&spec, &[1.0, 0.0], 20_000, 5).unwrap();
    assert!(r.passed);
    let u = check_uncorrected_distribution(&spec, &[1.0, 0.0], 20_000, 5).unwrap();
    assert!(u.passed);
    assert_eq!(r.component_means, u.component_means);
}

#[test]
fn uncorrected_fails_whenever_beta_is_far_from_one() {
    let spec = GaussianSpec::standard(256).unwrap();
    for (i, w) in [
        vec![0.5, 0.5],
        vec![0.3, 0.3, 0.3],
        vec![1.0, 0.6],
        vec![0.9, -0.8],
        vec![2.0],
    ]
    .into_iter()
    .enumerate()
    {
        let beta: f64 = w.iter().map(|v| v * v).sum();
        assert!((beta - 1.0).abs() > 0.2);
        let u = check_uncorrected_distribution(&spec, &w, 20_000, 100 + i as u64).unwrap();
        assert!(!u.passed, "w = {w:?}");
        assert!((u.max_rel_var_error - (beta - 1.0).abs()).abs() < 0.1 * beta.max(1.0));
        let c = check_cog_distribution(&spec, &w, 20_000, 100 + i as u64).unwrap();
        assert!(c.passed, "w = {w:?}: {}", c.to_kv());
    }
}

#[test]
fn degenerate_weights_are_rejected() {
    let spec = GaussianSpec::standard(4).unwrap();
    assert!(matches!(
        check_cog_distribution(&spec, &[0.0, 0.0], 1000, 0),
        Err(Error::DegenerateWeights { .. })
    ));
}

#[test]
fn slerp_beta_interval_narrows_with_sqrt_dim() {
    let wide = estimate_slerp_beta_ci(4096, 4000, 0.5, 0.99, 1).unwrap();
    let narrow = estimate_slerp_beta_ci(16384, 4000, 0.5, 0.99, 1).unwrap();
    let ratio = (narrow.hi - narrow.lo) / (wide.hi - wide.lo);
    assert!((0.4..=0.6).contains(&ratio), "{ratio}");
    // Half-width near 2.576 / sqrt(D).
    let hw = (wide.hi - wide.lo) / 2.0;
    assert!((hw * 64.0 / 2.576 - 1.0).abs() < 0.1, "{hw}");
}

#[test]
fn slerp_beta_at_endpoint_is_exactly_one() {
    let ci = estimate_slerp_beta_ci(36864, 100, 0.0, 0.99, 0).unwrap();
    assert_eq!((ci.lo, ci.hi), (1.0, 1.0));
}

#[test]
fn slerp_beta_rejects_bad_parameters() {
    assert!(estimate_slerp_beta_ci(16, 99, 0.5, 0.99, 0).is_err());
    assert!(estimate_slerp_beta_ci(16, 100, 0.5, 1.0, 0).is_err());
    assert!(estimate_slerp_beta_ci(16, 100, 0.5, 0.0, 0).is_err());
}

#[test]
fn quantiles_interpolate_linearly() {
    let xs = [1.0, 2.0, 4.0, 8.0];
    assert_eq!(quantile_sorted(&xs, 0.0), 1.0);
    assert_eq!(quantile_sorted(&xs, 1.0), 8.0);
    assert_eq!(quantile_sorted(&xs, 0.5), 3.0);
    assert!((quantile_sorted(&xs, 0.9) - 6.8).abs() < 1e-12);
}

#[test]
fn sampling_is_reproducible_and_prefix_stable() {
    let spec = GaussianSpec::isotropic(7, 1.0, 2.0).unwrap();
    let a = sample_latents(&spec, 50, 9);
    let b = sample_latents(&spec, 50, 9);
    let c = sample_latents(&spec, 20, 9);
    assert_eq!(a, b);
    assert_eq!(&a[..20], &c[..]);
    assert_ne!(a, sample_latents(&spec, 50, 10));
    let one = sample_latents(&GaussianSpec::standard(1).unwrap(), 1, 0);
    assert!(one[0].as_slice()[0].is_finite());
}
