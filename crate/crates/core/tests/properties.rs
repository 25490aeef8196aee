//! Property-based checks of the crate-wide invariants.

use granular_core::dsmc::{collide_pair, sample_direction};
use granular_core::restitution::{LogGrid, RestitutionModel};
use granular_core::timeseries::{Sample, TimeSeries};
use granular_core::Vec3;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn arbitrary_model() -> impl Strategy<Value = RestitutionModel> {
    prop_oneof![
        (0.05f64..=1.0).prop_map(|e0| RestitutionModel::constant(e0).unwrap()),
        (0.01f64..2.0, 0.05f64..2.0)
            .prop_map(|(alpha, gamma)| RestitutionModel::power_law(alpha, gamma, 0.05).unwrap()),
        (0.05f64..4.0).prop_map(|a| RestitutionModel::viscoelastic(a).unwrap()),
    ]
}

proptest! {
    /// theta round trip: |theta(theta^-1(y)) - y| <= 1e-12 max(1, y).
    #[test]
    fn invert_theta_round_trip(model in arbitrary_model(), log_y in -8.0f64..8.0) {
        let y = 10f64.powf(log_y);
        let r = model.invert_theta(y).unwrap();
        let back = model.eval_theta(r).unwrap();
        prop_assert!((back - y).abs() <= 1e-12 * y.max(1.0));
    }

    /// Jacobian agrees with central differences away from clamp kinks.
    /// The step scales with r: theta''' grows like r^(gamma-2) toward zero,
    /// so a fixed step loses the oracle's accuracy below r ~ 1e-4.
    #[test]
    fn jacobian_fd_consistency(model in arbitrary_model(), log_r in -5.0f64..5.0) {
        let r = 10f64.powf(log_r);
        let j = model.jacobian(r).unwrap();
        if !j.one_sided {
            let h = 1e-6 * r;
            // Skip straddles of the power-law clamp, where the derivative jumps.
            if let RestitutionModel::PowerLaw { alpha, gamma, e_floor } = model {
                let r_clamp = ((1.0 - e_floor) / alpha).powf(1.0 / gamma);
                if (r - r_clamp).abs() <= 2.0 * h {
                    return Ok(());
                }
            }
            let lo = (r - h).max(0.0);
            let fd = (model.eval_theta(r + h).unwrap() - model.eval_theta(lo).unwrap()) / (r + h - lo);
            prop_assert!((j.value - fd).abs() <= 1e-5 * j.value.abs().max(1.0),
                "r={r} value={} fd={fd}", j.value);
        }
    }

    /// Viscoelastic defining equation residual stays at solver precision.
    #[test]
    fn viscoelastic_residual(a in 0.05f64..4.0, log_r in -8.0f64..8.0) {
        let r = 10f64.powf(log_r);
        let model = RestitutionModel::viscoelastic(a).unwrap();
        let e = model.eval_e(r).unwrap();
        let residual = e + a * r.powf(0.2) * e.powf(0.6) - 1.0;
        prop_assert!(residual.abs() <= 1e-12);
    }

    /// Collision micro-identities hold for arbitrary pairs and models.
    #[test]
    fn collision_identities(
        model in arbitrary_model(),
        vx in -5.0f64..5.0, vy in -5.0f64..5.0, vz in -5.0f64..5.0,
        wx in -5.0f64..5.0, wy in -5.0f64..5.0, wz in -5.0f64..5.0,
        seed in 0u64..1000,
    ) {
        let v = Vec3::new(vx, vy, vz);
        let w = Vec3::new(wx, wy, wz);
        let u = v - w;
        prop_assume!(u.norm() > 1e-9);
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let n = sample_direction(u, &mut rng).unwrap();
        let (v1, v2) = collide_pair(v, w, n, &model).unwrap();
        let e = model.eval_e(u.dot(n).abs()).unwrap();

        prop_assert!((v1 + v2 - (v + w)).norm() <= 1e-12);
        let u_post = v1 - v2;
        prop_assert!((u_post.dot(n) + e * u.dot(n)).abs() <= 1e-12 * u.dot(n).abs().max(1.0));
        let de = v1.norm_sq() + v2.norm_sq() - v.norm_sq() - w.norm_sq();
        let expect = -(1.0 - e * e) / 2.0 * u.dot(n) * u.dot(n);
        prop_assert!((de - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        prop_assert!(((u - n * u.dot(n)) - (u_post - n * u_post.dot(n))).norm() <= 1e-12);
    }

    /// Psi stays below its elastic bound r^(3/2)/8 everywhere.
    #[test]
    fn psi_elastic_bound(model in arbitrary_model(), log_r in -6.0f64..6.0) {
        let r = 10f64.powf(log_r);
        let v = granular_core::dissipation::psi(&model, r).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!(v <= r.powf(1.5) / 8.0 * (1.0 + 1e-12));
    }

    /// CSV serialization round-trips bit-exactly.
    #[test]
    fn csv_round_trip(rows in proptest::collection::vec(
        (0.0f64..1e6, 1e-12f64..1e3, 1e-12f64..1e3, 0u64..u64::MAX / 2), 1..20)
    ) {
        let mut series = TimeSeries::new(vec![1.5]);
        for (t, energy, m, collisions) in rows {
            series.push(Sample { t, energy, moments: vec![m], entropy: f64::NAN, collisions });
        }
        let parsed = TimeSeries::from_csv(&series.to_csv()).unwrap();
        prop_assert_eq!(parsed.rows.len(), series.rows.len());
        for (a, b) in parsed.rows.iter().zip(&series.rows) {
            prop_assert_eq!(a.t.to_bits(), b.t.to_bits());
            prop_assert_eq!(a.energy.to_bits(), b.energy.to_bits());
            prop_assert_eq!(a.moments[0].to_bits(), b.moments[0].to_bits());
            prop_assert_eq!(a.collisions, b.collisions);
        }
    }
}

/// ell_gamma detection: the grid estimate lands within 5% of the prefactor
/// for viscoelastic models. (The estimate equals a e(r_min)^(3/5), so the
/// default grid floor of 1e-8 resolves 5% only for a up to about 3.)
#[test]
fn ell_gamma_detection_sweep() {
    let grid = LogGrid::default();
    for &a in &[0.1, 0.5, 1.0, 2.0] {
        let model = RestitutionModel::viscoelastic(a).unwrap();
        let ell = model.ell_gamma(0.2, &grid).unwrap();
        assert!(ell >= 0.95 * a && ell <= 1.05 * a, "a={a} ell={ell}");
    }
}
