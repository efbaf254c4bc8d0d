//! Random small-rational connection data and surface states for the
//! randomized exact verification suites.
//!
//! Numerators and denominators stay <= 20 in magnitude; anything degenerate
//! is resampled so exact arithmetic stays fast while exercising generic
//! position.

use rand::Rng;

use crate::exact::BigRat;
use crate::linprob::{ConnectionData, SurfaceState};

pub fn sample_rat<R: Rng>(rng: &mut R) -> BigRat {
    loop {
        let n: i64 = rng.random_range(-12..=12);
        if n == 0 {
            continue;
        }
        let d: i64 = rng.random_range(1..=8);
        return BigRat::from((n, d));
    }
}

/// A nonzero rational q with |q| < 1 (never a root of unity).
pub fn sample_q<R: Rng>(rng: &mut R) -> BigRat {
    loop {
        let d: i64 = rng.random_range(2..=9);
        let n: i64 = rng.random_range(-(d - 1)..=(d - 1));
        if n == 0 {
            continue;
        }
        return BigRat::from((n, d));
    }
}

pub fn sample_connection<R: Rng>(rng: &mut R) -> ConnectionData {
    loop {
        let a = [sample_rat(rng), sample_rat(rng), sample_rat(rng)];
        if a[0] == a[1] || a[0] == a[2] || a[1] == a[2] {
            continue;
        }
        let kappa = [sample_rat(rng), sample_rat(rng)];
        let lambda1 = sample_rat(rng);
        let q = sample_q(rng);
        if let Ok(m) = ConnectionData::with_lambda2_solved(a, kappa, lambda1, q) {
            return m;
        }
    }
}

pub fn sample_state<R: Rng>(rng: &mut R, m: &ConnectionData) -> SurfaceState {
    loop {
        let s = SurfaceState::new(sample_rat(rng), sample_rat(rng), sample_rat(rng));
        if s.validate(m).is_ok() {
            return s;
        }
    }
}

pub fn sample_problem<R: Rng>(rng: &mut R) -> (ConnectionData, SurfaceState) {
    let m = sample_connection(rng);
    let s = sample_state(rng, &m);
    (m, s)
}

/// Sample until `f` accepts (used to skip states that are degenerate for a
/// particular deformation step). Panics after an implausible retry count.
pub fn sample_until<R: Rng, T>(
    rng: &mut R,
    mut f: impl FnMut(&ConnectionData, &SurfaceState) -> Option<T>,
) -> T {
    for _ in 0..10_000 {
        let (m, s) = sample_problem(rng);
        if let Some(t) = f(&m, &s) {
            return t;
        }
    }
    panic!("sample_until: no nondegenerate sample in 10000 draws");
}
