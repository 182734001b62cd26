use qaud::annealer::io::{profile_from_csv, profile_to_csv, schedule_from_csv, schedule_to_csv};
use qaud::annealer::{
    annealing_time, detector_correlation, estimate_mean_gap, estimate_qaer, evolve, problem_diagonal, qaer_samples,
    solve_schedule, spectral_gap_squared, success_probability, uniform_grid, EvolveOptions, GapProfile, QuantumState,
    ScheduleOptions,
};
use qaud::ising::{build_ising, ising_energy, spins_from_activity, IsingProblem, SpinConfig};
use qaud::nnls::{aer_samples, brute_force_nnls};
use qaud::{ExecMode, InstanceParams, PilotScheme, RngStream};

fn params(scheme: PilotScheme) -> InstanceParams {
    InstanceParams::noiseless(scheme, 4, 5, 64)
}

fn profile(scheme: PilotScheme, samples: usize) -> GapProfile {
    estimate_mean_gap(&params(scheme), samples, &uniform_grid(21), 17, ExecMode::Parallel).unwrap()
}

fn instance_problem(scheme: PilotScheme, t: usize) -> (IsingProblem, SpinConfig, SpinConfig) {
    let inst = params(scheme).sample(RngStream::for_trial(101, t)).unwrap();
    let problem = build_ising(&inst.pilots, &inst.sample_cov).unwrap();
    let nnls = brute_force_nnls(&inst.pilots, &inst.sample_cov).unwrap();
    (problem, spins_from_activity(&nnls.minimizer), spins_from_activity(&inst.activity))
}

#[test]
fn diagonal_lists_classical_energies() {
    for t in 0..20 {
        let (problem, _, _) = instance_problem(PilotScheme::Gaussian, t);
        let diag = problem_diagonal(&problem).unwrap();
        for (s, d) in diag.iter().enumerate() {
            let e = ising_energy(&problem, &SpinConfig::from_index(5, s)).unwrap();
            assert!((d - e).abs() <= 1e-12);
        }
    }
}

#[test]
fn gap_at_zero_field_is_the_classical_gap() {
    for t in 0..20 {
        let (problem, _, _) = instance_problem(PilotScheme::UnitSphere, t);
        let mut energies: Vec<f64> = (0..32).map(|s| problem.energy_of_index(s)).collect();
        energies.sort_by(f64::total_cmp);
        let expected = (energies[1] - energies[0]).powi(2);
        let got = spectral_gap_squared(&problem, 0.0).unwrap();
        assert!((got - expected).abs() <= 1e-9 * (1.0 + expected), "{got} vs {expected}");
    }
}

#[test]
fn mean_gap_anchor_and_scheme_contrast() {
    let g = profile(PilotScheme::Gaussian, 200);
    let s = profile(PilotScheme::UnitSphere, 200);
    for p in [&g, &s] {
        assert!(p.gap_sq().iter().all(|&v| v > 0.0));
        assert!((p.gap_sq().last().unwrap() - 4.0).abs() <= 1e-9);
        assert_eq!(p.u_grid().first(), Some(&0.0));
        assert_eq!(p.u_grid().last(), Some(&1.0));
    }
    let max_rel = g
        .gap_sq()
        .iter()
        .zip(s.gap_sq())
        .map(|(a, b)| (a - b).abs() / a.max(*b))
        .fold(0.0, f64::max);
    assert!(max_rel > 0.05, "profiles differ by only {max_rel}");
}

#[test]
fn mean_gap_is_reproducible_across_modes() {
    let grid = uniform_grid(5);
    let a = estimate_mean_gap(&params(PilotScheme::Gaussian), 30, &grid, 3, ExecMode::Sequential).unwrap();
    let b = estimate_mean_gap(&params(PilotScheme::Gaussian), 30, &grid, 3, ExecMode::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn schedule_time_agrees_with_quadrature_and_scales_with_precision() {
    let p = profile(PilotScheme::Gaussian, 100);
    let f = p.interpolant();
    // independent composite midpoint rule
    let n = 100_000;
    let oracle: f64 = (0..n).map(|i| 1.0 / f.eval((i as f64 + 0.5) / n as f64)).sum::<f64>() / n as f64;
    let mut prev: Option<(f64, f64)> = None;
    for eps in [0.1, 0.05, 0.01, 0.005, 0.001] {
        let quad = annealing_time(&p, eps).unwrap();
        let sched = solve_schedule(&p, eps, &ScheduleOptions::default()).unwrap();
        assert!((sched.duration() - quad).abs() / quad < 1e-3);
        assert!((quad * eps - oracle).abs() / oracle < 1e-3);
        assert_eq!(sched.u_values()[0], 1.0);
        assert!(sched.u_values().last().unwrap().abs() <= 1e-9);
        assert!(sched.u_values().windows(2).all(|w| w[1] <= w[0]));
        if let Some((prev_eps, prev_t)) = prev {
            if prev_eps == 2.0 * eps {
                assert!((quad / prev_t - 2.0).abs() < 1e-3);
            }
        }
        prev = Some((eps, quad));
    }
    let ratio = annealing_time(&p, 0.001).unwrap() / annealing_time(&p, 0.01).unwrap();
    assert!((ratio - 10.0).abs() < 1e-9);
}

#[test]
fn evolutions_stay_normalized() {
    let p = profile(PilotScheme::UnitSphere, 50);
    let sched = solve_schedule(&p, 0.1, &ScheduleOptions::default()).unwrap();
    for t in 0..100 {
        let inst = params(PilotScheme::UnitSphere).with_snr(5.0).sample(RngStream::for_trial(202, t)).unwrap();
        let problem = build_ising(&inst.pilots, &inst.sample_cov).unwrap();
        let psi = evolve(&problem, &sched, &EvolveOptions::default()).unwrap();
        assert!((psi.norm() - 1.0).abs() <= 1e-8);
        let total: f64 = (0..32).map(|s| success_probability(&psi, &SpinConfig::from_index(5, s))).sum();
        assert!((total - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn slower_anneals_succeed_more_often() {
    let p = profile(PilotScheme::Gaussian, 100);
    let mut medians = Vec::new();
    for eps in [0.1, 0.01, 0.001] {
        let sched = solve_schedule(&p, eps, &ScheduleOptions::default()).unwrap();
        let probs: Vec<f64> = (0..12)
            .map(|t| {
                let (problem, target, _) = instance_problem(PilotScheme::Gaussian, t);
                success_probability(&evolve(&problem, &sched, &EvolveOptions::default()).unwrap(), &target)
            })
            .collect();
        medians.push(qaud::stats::median(&probs));
    }
    assert!(medians[0] < medians[1] && medians[1] < medians[2], "{medians:?}");
    assert!(medians[2] >= 0.9, "{medians:?}");
}

#[test]
fn pure_nnls_state_reproduces_the_classical_bit_error() {
    for t in 0..50 {
        let inst = params(PilotScheme::Gaussian).with_snr(0.0).sample(RngStream::for_trial(303, t)).unwrap();
        let nnls = brute_force_nnls(&inst.pilots, &inst.sample_cov).unwrap();
        let psi = QuantumState::basis(5, spins_from_activity(&nnls.minimizer).index()).unwrap();
        let d = detector_correlation(&psi, &spins_from_activity(&inst.activity));
        let bit_error = nnls.minimizer.hamming(&inst.activity) as f64 / 5.0;
        assert!((0.5 * (1.0 - d) - bit_error).abs() < 1e-15);
    }
}

#[test]
fn qaer_tracks_the_classical_rate_when_slow() {
    let prm = params(PilotScheme::UnitSphere).with_snr(10.0);
    let p = estimate_mean_gap(&prm, 100, &uniform_grid(21), 5, ExecMode::Parallel).unwrap();
    let opts = EvolveOptions::default();
    let fast = estimate_qaer(&prm, 0.1, &p, 60, 9, &opts, ExecMode::Parallel).unwrap();
    let slow = qaer_samples(&prm, 0.003, &p, 60, 9, &opts, ExecMode::Parallel).unwrap();
    let classical = aer_samples(&prm, 60, 9, ExecMode::Parallel).unwrap();
    let slow_mean = slow.iter().sum::<f64>() / 60.0;
    assert!(slow_mean < fast.mean);
    let gap = slow.iter().zip(&classical).map(|(q, c)| (q - c).abs()).sum::<f64>() / 60.0;
    assert!(gap < 0.02, "mean per-trial gap {gap}");
}

#[test]
fn qaer_refuses_mismatched_profile() {
    let p = profile(PilotScheme::Gaussian, 5);
    let err = estimate_qaer(&params(PilotScheme::UnitSphere), 0.1, &p, 2, 0, &EvolveOptions::default(), ExecMode::Sequential);
    assert!(err.is_err());
}

#[test]
fn profile_and_schedule_survive_csv() {
    let p = profile(PilotScheme::UnitSphere, 10);
    let back = profile_from_csv(&profile_to_csv(&p)).unwrap();
    assert_eq!(back, p);
    let sched = solve_schedule(&p, 0.05, &ScheduleOptions::default()).unwrap();
    let s2 = schedule_from_csv(&schedule_to_csv(&sched, "scheme=unit_sphere")).unwrap();
    assert_eq!(s2.times(), sched.times());
    assert_eq!(s2.u_values(), sched.u_values());
    assert_eq!(s2.epsilon(), sched.epsilon());
}
