use proptest::prelude::*;
use zeno_core::engine::{run_tunneling, run_unitary, run_zeno, ZenoSchedule};
use zeno_core::linalg::{QuantumState, C64};
use zeno_core::models::{build_three_level, build_tunneling};
use zeno_core::report::{sweep, ScenarioConfig};

fn comp_state(theta: f64, phase: f64) -> QuantumState {
    QuantumState::new(vec![
        C64::new(theta.cos(), 0.0),
        C64::from_polar(theta.sin(), phase),
        C64::new(0.0, 0.0),
    ])
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn zeno_traces_are_monotone_and_measured(
        omega in 0.0f64..0.5,
        phi in -3.2f64..3.2,
        eta in -0.5f64..0.0,
        n in 1usize..120,
        dt in 0.01f64..0.5,
        theta in 0.0f64..1.6,
        phase in -3.2f64..3.2,
    ) {
        let h = build_three_level(omega, phi, eta);
        let (trace, record) = run_zeno(&h, &comp_state(theta, phase), ZenoSchedule::new(n, dt).unwrap()).unwrap();
        prop_assert_eq!(trace.len(), n + 1);
        prop_assert!(trace.survival.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(trace.survival.iter().all(|w| (0.0..=1.0).contains(w)));
        prop_assert!(trace.population_series(2).iter().all(|&p| p == 0.0));
        for norm in trace.norm_sqr() {
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
        prop_assert_eq!(record.w_zeno, trace.final_survival());
    }

    #[test]
    fn unitary_traces_keep_norm(
        omega in 0.0f64..0.5,
        eta in -0.5f64..0.0,
        t_total in 0.1f64..50.0,
    ) {
        let h = build_three_level(omega, -std::f64::consts::FRAC_PI_2, eta);
        let trace = run_unitary(&h, &QuantumState::basis(3, 0).unwrap(), t_total, 40).unwrap();
        prop_assert_eq!(*trace.times.last().unwrap(), t_total);
        for norm in trace.norm_sqr() {
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tunneling_only_loses_norm(
        omega in 0.0f64..0.5,
        eta in -0.5f64..0.0,
        gamma in 0.0f64..80.0,
        t_total in 0.1f64..10.0,
    ) {
        let h = build_tunneling(omega, eta, gamma).unwrap();
        let (trace, record) = run_tunneling(&h, &QuantumState::basis(3, 0).unwrap(), t_total, 400).unwrap();
        let norms = trace.norm_sqr();
        prop_assert!(norms.windows(2).all(|w| w[1] <= w[0] + 1e-14));
        for (w, norm) in trace.survival.iter().zip(&norms) {
            prop_assert!(*w <= norm + 1e-15 && *w >= 0.0);
        }
        prop_assert_eq!(record.w_tunnel, trace.final_survival());
    }
}

#[test]
fn n_sweep_tail_approaches_one() {
    let cfg = ScenarioConfig::from_toml_str(
        "mode = \"sweep\"\naxis = \"n\"\ngrid = [100, 400]\nomega = 0.05\neta = -0.2\nt_total = 5.0\n",
    )
    .unwrap();
    let result = sweep(&cfg).unwrap();
    let w: Vec<f64> = result.points.iter().map(|p| p.record.w_zeno.unwrap()).collect();
    assert!(w[1] > w[0]);
    assert!(w.iter().all(|x| (0.0..=1.0).contains(x)));
}

#[test]
fn tunneling_leakage_shrinks_with_gamma() {
    let psi0 = QuantumState::basis(3, 0).unwrap();
    let peaks: Vec<f64> = [0.0, 10.0, 40.0, 80.0]
        .iter()
        .map(|&g| {
            let h = build_tunneling(0.05, -0.2, g).unwrap();
            run_tunneling(&h, &psi0, 5.0, 4000).unwrap().0.max_population(2)
        })
        .collect();
    assert!(peaks.windows(2).all(|p| p[1] < p[0]), "{peaks:?}");
}
