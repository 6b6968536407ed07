//! Acceptance suite. Each criterion prints one `PASS`/`FAIL` line; the test
//! fails if any criterion fails.

mod common;

use common::*;
use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use retrovir::equilibria::{inner_equilibrium, residual, Equilibrium};
use retrovir::integrator::{empirical_bound, integrate, lyapunov_trace, IntegrationOptions};
use retrovir::lyapunov::{
    condition4, omega_at, search_coeffs, w_dot, w_value, Condition4Variant, LyapunovCoeffs,
};
use retrovir::stability::{routh_hurwitz_cubic, Verdict};
use retrovir::sweep::{stability_map, SweepGrid, SweepResult};
use retrovir::{CubicCoeffs, ModelParams, State};

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// --- 1 ---------------------------------------------------------------------

fn equilibrium_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut found = 0;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        if let Some(eq) = inner_equilibrium(&p).unwrap() {
            found += 1;
            worst = worst.max(residual(&p, &eq.point));
        }
    }
    let p1 = inner_equilibrium(&P1).unwrap().map(|e| e.point);
    let p3 = inner_equilibrium(&P3).unwrap();
    check(
        found > 100 && worst < 1e-10 && p1 == Some(State::new(1.0, 0.5, 0.25)) && p3.is_none(),
        format!("{found}/1000 inner equilibria, worst residual {worst:.2e}; P1 {p1:?}; P3 {p3:?}"),
    )
}

// --- 2 ---------------------------------------------------------------------

fn master_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut sets = 0;
    let mut worst = 0.0f64;
    while sets < 25 {
        let p = random_params(&mut rng);
        let Some(eq) = inner_equilibrium(&p).unwrap() else {
            continue;
        };
        sets += 1;
        let coeffs = LyapunovCoeffs::new(
            rng.random_range(0.1..10.0),
            rng.random_range(0.1..10.0),
            rng.random_range(0.1..10.0),
        );
        let e = eq.point;
        for _ in 0..1000 {
            let s = State::new(
                e.c * rng.random_range(0.05..4.0),
                e.i * rng.random_range(0.05..4.0),
                e.v * rng.random_range(0.05..4.0),
            );
            let wd = w_dot(&p, &coeffs, &eq, &s).unwrap();
            let q = omega_at(&p, &coeffs, &eq, &s).unwrap().quadratic([
                s.v - e.v,
                s.i - e.i,
                s.c - e.c,
            ]);
            worst = worst.max((-wd - q).abs() / (1.0 + wd.abs()));
        }
    }
    check(
        worst <= 1e-10,
        format!("{sets} parameter sets x 1000 states, worst relative gap {worst:.2e}"),
    )
}

// --- 3 ---------------------------------------------------------------------

fn centered_difference_error(
    p: &ModelParams,
    coeffs: &LyapunovCoeffs,
    eq: &Equilibrium,
    s: State,
    h: f64,
) -> f64 {
    let fwd = flow(p, s, h, 64);
    let bwd = flow(p, s, -h, 64);
    let fd = (w_value(coeffs, eq, &fwd).unwrap() - w_value(coeffs, eq, &bwd).unwrap()) / (2.0 * h);
    (fd - w_dot(p, coeffs, eq, &s).unwrap()).abs()
}

fn gradient_check() -> Outcome {
    let coeffs = LyapunovCoeffs::new(1.0, 2.0, 0.5);
    let mut ratios = Vec::new();
    for p in [P2, WEAK_COMPETITION, SLOW_CLEARANCE, HOPF_PRONE] {
        let eq = inner_equilibrium(&p).unwrap().unwrap();
        let s0 = State::new(1.3 * eq.point.c, 0.7 * eq.point.i, 1.2 * eq.point.v);
        let traj = integrate(&p, &s0, &IntegrationOptions::fixed(3.0, 0.01)).unwrap();
        for idx in [0, 100, 200] {
            let s = traj.states[idx];
            let (e1, e2) = (
                centered_difference_error(&p, &coeffs, &eq, s, 0.04),
                centered_difference_error(&p, &coeffs, &eq, s, 0.02),
            );
            ratios.push(e1 / e2);
        }
    }
    let ok = ratios.iter().all(|r| (r - 4.0).abs() <= 0.3 * 4.0);
    check(
        ok,
        format!(
            "{} points, error ratios in [{:.3}, {:.3}]",
            ratios.len(),
            ratios.iter().cloned().fold(f64::INFINITY, f64::min),
            ratios.iter().cloned().fold(0.0, f64::max)
        ),
    )
}

// --- 4 & 5 -------------------------------------------------------------------

struct Family {
    name: &'static str,
    base: ModelParams,
    alpha_hi: f64,
}

fn families() -> [Family; 4] {
    [
        Family {
            name: "P2",
            base: P2,
            alpha_hi: 1.0,
        },
        Family {
            name: "weak-competition",
            base: WEAK_COMPETITION,
            alpha_hi: 1.0,
        },
        Family {
            name: "slow-clearance",
            base: SLOW_CLEARANCE,
            alpha_hi: 1.0,
        },
        Family {
            name: "hopf-prone",
            base: HOPF_PRONE,
            alpha_hi: 30.0,
        },
    ]
}

fn family_sweep(f: &Family) -> SweepResult {
    let grid = SweepGrid::log_spaced(f.base, (0.01, f.alpha_hi, 20), (0.1, 2.0, 20));
    stability_map(&grid).unwrap()
}

/// W samples along a trace never rise by more than `slack` per step.
fn non_increasing(trace: &[f64], slack: f64) -> bool {
    trace.windows(2).all(|w| w[1] <= w[0] + slack)
}

fn perturbations(e: State) -> [State; 4] {
    [
        e.scale(1.01),
        e.scale(0.99),
        State::new(1.01 * e.c, 0.99 * e.i, 1.01 * e.v),
        State::new(0.99 * e.c, 1.01 * e.i, 0.99 * e.v),
    ]
}

fn small_parameter_stability() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    let mut qualifying = 0;
    for f in families() {
        let eq = inner_equilibrium(&f.base).unwrap().unwrap();
        if !condition4(&f.base, &eq, Condition4Variant::Corrected)
            .unwrap()
            .holds
        {
            details.push(format!("{}: condition fails, skipped", f.name));
            continue;
        }
        qualifying += 1;
        let res = family_sweep(&f);
        let (Some(a0), Some(k0)) = (res.alpha0, res.k0) else {
            ok = false;
            details.push(format!("{}: empty stable rectangle", f.name));
            continue;
        };
        let rect_ok = res
            .iter_cells()
            .filter(|c| c.alpha <= a0 && c.k <= k0)
            .all(|c| {
                let p = f.base.with_alpha_k(c.alpha, c.k);
                let eq = inner_equilibrium(&p).unwrap().unwrap();
                retrovir::stability::classify_equilibrium(&p, &eq)
                    .unwrap()
                    .verdict
                    == Verdict::Stable
            });

        // traces at the base point and at the smallest (alpha, k) cell
        let mut traces_ok = true;
        let anchor = f.base.with_alpha_k(res.alpha_values[0], res.k_values[0]);
        for p in [f.base, anchor] {
            let eq = inner_equilibrium(&p).unwrap().unwrap();
            let Some(found) = search_coeffs(&p, &eq).unwrap() else {
                traces_ok = false;
                continue;
            };
            for s0 in perturbations(eq.point) {
                let traj = lyapunov_trace(
                    &p,
                    &found.coeffs,
                    &eq,
                    &s0,
                    &IntegrationOptions::fixed(30.0, 0.01),
                )
                .unwrap();
                let w: Vec<f64> = traj.lyapunov.unwrap().iter().map(|l| l.w).collect();
                traces_ok &= non_increasing(&w, 1e-9);
            }
        }
        ok &= rect_ok && traces_ok;
        details.push(format!(
            "{}: alpha0={a0:.4} k0={k0:.4} rect_stable={rect_ok} traces_monotone={traces_ok}",
            f.name
        ));
    }
    check(
        ok && qualifying >= 3,
        format!("{qualifying} families; {}", details.join("; ")),
    )
}

fn cross_route_soundness() -> Outcome {
    let mut cells = 0;
    let mut violations = 0;
    let mut flag_mismatch = false;
    for f in families() {
        let res = family_sweep(&f);
        for c in res.iter_cells().filter(|c| c.inner_exists) {
            cells += 1;
            let p = f.base.with_alpha_k(c.alpha, c.k);
            let eq = inner_equilibrium(&p).unwrap().unwrap();
            let rep = retrovir::stability::classify_equilibrium(&p, &eq).unwrap();
            let unstable = rep.verdict == Verdict::Unstable && rep.margins.min() < -1e-8;
            let search = search_coeffs(&p, &eq).unwrap();
            flag_mismatch |= search.is_some() != c.sylvester_pd;
            let pd = search.is_some_and(|found| found.form.minors.exceed(1e-10));
            if pd && unstable {
                violations += 1;
            }
        }
    }
    check(
        violations == 0 && !flag_mismatch,
        format!("{cells} cells, {violations} Sylvester-PD/unstable conflicts"),
    )
}

// --- 6 ---------------------------------------------------------------------

fn basic_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut min_coord = f64::INFINITY;
    let mut worst_cap_ratio = 0.0f64;
    for run in 0..100 {
        let p = random_params(&mut rng);
        let mut s0 = State::new(
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0),
        );
        // some runs start on a face of the octant
        match run % 5 {
            1 => s0.c = 0.0,
            2 => s0.i = 0.0,
            3 => s0.v = 0.0,
            _ => {}
        }
        let traj = integrate(&p, &s0, &IntegrationOptions::adaptive(50.0, 1e-8, 1e-10)).unwrap();
        let cap = empirical_bound(&p, &s0);
        for s in &traj.states {
            min_coord = min_coord.min(s.min_coord());
            worst_cap_ratio = worst_cap_ratio.max(s.norm_inf() / cap);
        }
    }
    check(
        min_coord >= -1e-9 && worst_cap_ratio <= 1.0,
        format!("min coordinate {min_coord:.2e}, max/cap {worst_cap_ratio:.3}"),
    )
}

// --- 7 ---------------------------------------------------------------------

fn final_error(
    p: &ModelParams,
    s0: State,
    t_end: f64,
    dt: f64,
    exact: f64,
    pick: fn(&State) -> f64,
) -> f64 {
    let traj = integrate(p, &s0, &IntegrationOptions::fixed(t_end, dt)).unwrap();
    (pick(traj.states.last().unwrap()) - exact).abs()
}

fn integrator_order() -> Outcome {
    let decay = ModelParams { sigma: 2.0, ..P2 };
    let v_exact = (-2.0f64).exp();
    let v = |s: &State| s.v;
    let ev = [0.1, 0.05, 0.01]
        .map(|dt| final_error(&decay, State::new(0.0, 0.0, 1.0), 1.0, dt, v_exact, v));

    let logistic = P2;
    let (c0, t_end) = (0.1, 5.0);
    let c_exact =
        c0 / (logistic.b11 * c0 + (1.0 - logistic.b11 * c0) * (-logistic.a * t_end).exp());
    let c = |s: &State| s.c;
    let el = [0.1, 0.05, 0.01]
        .map(|dt| final_error(&logistic, State::new(c0, 0.0, 0.0), t_end, dt, c_exact, c));

    let (rv, rl) = (ev[0] / ev[1], el[0] / el[1]);
    let in_band = |r: f64| (r - 16.0).abs() <= 0.25 * 16.0;
    check(
        in_band(rv) && in_band(rl) && ev[2] < 1e-8 && el[2] < 1e-8,
        format!(
            "exponential ratio {rv:.3} (err@0.01 {:.1e}), logistic ratio {rl:.3} (err@0.01 {:.1e})",
            ev[2], el[2]
        ),
    )
}

// --- 8 ---------------------------------------------------------------------

fn max_root_real_part(c: &CubicCoeffs) -> f64 {
    let companion = Matrix3::new(-c.p, -c.q, -c.r, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    companion
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn random_cubic<R: Rng>(rng: &mut R, from_roots: bool) -> CubicCoeffs {
    if !from_roots {
        return CubicCoeffs {
            p: rng.random_range(-3.0..3.0),
            q: rng.random_range(-3.0..3.0),
            r: rng.random_range(-3.0..3.0),
        };
    }
    // (λ - x)(λ² - 2uλ + u² + w²)
    let x: f64 = rng.random_range(-3.0..1.0);
    let u: f64 = rng.random_range(-3.0..1.0);
    let w: f64 = if rng.random_bool(0.5) {
        rng.random_range(0.0..2.0)
    } else {
        0.0
    };
    let (b, c) = (-2.0 * u, u * u + w * w);
    CubicCoeffs {
        p: b - x,
        q: c - x * b,
        r: -x * c,
    }
}

fn routh_hurwitz_vs_roots() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut compared, mut skipped, mut mismatches, mut stable) = (0, 0, 0, 0);
    for n in 0..500 {
        let cubic = random_cubic(&mut rng, n % 2 == 1);
        let rep = routh_hurwitz_cubic(cubic);
        let re = max_root_real_part(&cubic);
        if rep.margins.as_array().iter().any(|m| m.abs() <= 1e-10) || re.abs() <= 1e-10 {
            skipped += 1;
            continue;
        }
        compared += 1;
        let roots_stable = re < 0.0;
        stable += roots_stable as usize;
        let agrees = match rep.verdict {
            Verdict::Stable => roots_stable,
            Verdict::Unstable => !roots_stable,
            Verdict::Marginal => false,
        };
        mismatches += (!agrees) as usize;
    }
    check(
        mismatches == 0,
        format!("{compared} compared ({stable} stable), {skipped} near-marginal skipped, {mismatches} mismatches"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 8] = [
        ("1 equilibrium correctness", equilibrium_correctness),
        ("2 master Lyapunov identity", master_identity),
        ("3 W-dot finite-difference check", gradient_check),
        ("4 small-parameter stability region", small_parameter_stability),
        ("5 cross-route soundness", cross_route_soundness),
        ("6 nonnegativity and boundedness", basic_properties),
        ("7 integrator order", integrator_order),
        ("8 Routh-Hurwitz vs roots", routh_hurwitz_vs_roots),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                println!("FAIL  criterion {name}: {detail}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
