//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use rand::Rng;
use retrovir::model::vector_field;
use retrovir::{ModelParams, State};

pub const P1: ModelParams = ModelParams {
    a: 1.0,
    a_i: 2.0,
    b11: 1.0,
    b12: 0.0,
    b21: 0.0,
    b22: 1.0,
    alpha: 0.0,
    m: 1.0,
    k: 1.0,
    sigma: 2.0,
};

pub const P2: ModelParams = ModelParams {
    a: 1.0,
    a_i: 2.0,
    b11: 1.0,
    b12: 0.1,
    b21: 0.1,
    b22: 1.0,
    alpha: 0.5,
    m: 0.5,
    k: 1.0,
    sigma: 1.0,
};

pub const P3: ModelParams = ModelParams {
    a_i: 1.0,
    m: 2.0,
    ..P1
};

/// Weak competition, slow infected-cell death.
pub const WEAK_COMPETITION: ModelParams = ModelParams {
    a: 1.0,
    a_i: 1.5,
    b11: 1.0,
    b12: 0.2,
    b21: 0.2,
    b22: 1.0,
    alpha: 0.5,
    m: 0.3,
    k: 1.0,
    sigma: 1.0,
};

/// Fast uninfected growth, slow virion clearance.
pub const SLOW_CLEARANCE: ModelParams = ModelParams {
    a: 2.0,
    a_i: 1.0,
    b11: 0.5,
    b12: 0.1,
    b21: 0.1,
    b22: 0.8,
    alpha: 0.5,
    m: 0.4,
    k: 1.0,
    sigma: 0.5,
};

/// Infected cells barely outgrow their death rate; the inner equilibrium
/// loses stability once alpha reaches a few units.
pub const HOPF_PRONE: ModelParams = ModelParams {
    a: 4.4,
    a_i: 0.48,
    b11: 0.95,
    b12: 0.49,
    b21: 0.04,
    b22: 1.98,
    alpha: 0.5,
    m: 0.44,
    k: 1.0,
    sigma: 0.44,
};

pub fn random_params<R: Rng>(rng: &mut R) -> ModelParams {
    ModelParams {
        a: rng.random_range(0.2..5.0),
        a_i: rng.random_range(0.2..5.0),
        b11: rng.random_range(0.2..3.0),
        b12: rng.random_range(0.0..1.0),
        b21: rng.random_range(0.0..1.0),
        b22: rng.random_range(0.2..3.0),
        alpha: rng.random_range(0.0..2.0),
        m: rng.random_range(0.05..3.0),
        k: rng.random_range(0.05..3.0),
        sigma: rng.random_range(0.1..3.0),
    }
}

/// Flow map by many small RK4 sub-steps of either sign; evaluates only the
/// vector field, so it is independent of the library integrator.
pub fn flow(params: &ModelParams, s: State, t: f64, substeps: usize) -> State {
    let h = t / substeps as f64;
    let f = |x: [f64; 3]| vector_field(params, &State::from_array(x)).to_array();
    let axpy =
        |x: [f64; 3], k: [f64; 3], a: f64| [x[0] + a * k[0], x[1] + a * k[1], x[2] + a * k[2]];
    let mut x = s.to_array();
    for _ in 0..substeps {
        let k1 = f(x);
        let k2 = f(axpy(x, k1, h / 2.0));
        let k3 = f(axpy(x, k2, h / 2.0));
        let k4 = f(axpy(x, k3, h));
        for d in 0..3 {
            x[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
    }
    State::from_array(x)
}
