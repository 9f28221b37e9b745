//! Quadratic algebras over the integers, presented by `x^2 = sigma x + tau`.
//!
//! The discriminant `sigma^2 + 4 tau` is a complete isomorphism invariant:
//! changing the lift (`x -> x + r`) and negating the generator sweep out the
//! full orbit of presentations, and every discriminant is 0 or 1 mod 4, so
//! each orbit has the normal form `(0, delta/4)` or `(1, (delta-1)/4)`.
//!
//! A rational-presentation variant carries the same arithmetic over the
//! rationals; the cubic solver uses it for coefficients that live in
//! fractions of the Euler characteristic.

use crate::exactalg::Rational;

/// An integral presentation `x^2 = sigma x + tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadraticAlgebraPresentation {
    pub sigma: i64,
    pub tau: i64,
}

impl QuadraticAlgebraPresentation {
    pub fn new(sigma: i64, tau: i64) -> Self {
        QuadraticAlgebraPresentation { sigma, tau }
    }
}

/// The discriminant `sigma^2 + 4 tau`.
pub fn delta(a: QuadraticAlgebraPresentation) -> i64 {
    a.sigma * a.sigma + 4 * a.tau
}

/// Re-present after replacing the lift `x` by `x + r`.
pub fn change_lift(a: QuadraticAlgebraPresentation, r: i64) -> QuadraticAlgebraPresentation {
    QuadraticAlgebraPresentation {
        sigma: a.sigma + 2 * r,
        tau: a.tau - a.sigma * r - r * r,
    }
}

/// Re-present after negating the generator.
pub fn negate_generator(a: QuadraticAlgebraPresentation) -> QuadraticAlgebraPresentation {
    QuadraticAlgebraPresentation {
        sigma: -a.sigma,
        tau: a.tau,
    }
}

/// Two presentations give isomorphic algebras iff their discriminants agree.
pub fn isomorphic(a: QuadraticAlgebraPresentation, b: QuadraticAlgebraPresentation) -> bool {
    delta(a) == delta(b)
}

/// Canonical orbit representative: `(0, delta/4)` when `delta = 0 mod 4`,
/// `(1, (delta-1)/4)` when `delta = 1 mod 4`. No other residues occur.
pub fn normal_form(a: QuadraticAlgebraPresentation) -> QuadraticAlgebraPresentation {
    let d = delta(a);
    match d.rem_euclid(4) {
        0 => QuadraticAlgebraPresentation::new(0, d / 4),
        1 => QuadraticAlgebraPresentation::new(1, (d - 1) / 4),
        other => unreachable!("discriminant {d} is {other} mod 4"),
    }
}

/// Rational presentation variant, used when the cubic coefficients live in
/// fractions of chi.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalQuadraticPresentation {
    pub sigma: Rational,
    pub tau: Rational,
}

impl RationalQuadraticPresentation {
    pub fn new(sigma: Rational, tau: Rational) -> Self {
        RationalQuadraticPresentation { sigma, tau }
    }

    pub fn delta(&self) -> Rational {
        &self.sigma * &self.sigma + Rational::from_integer(4.into()) * &self.tau
    }

    pub fn change_lift(&self, r: &Rational) -> Self {
        RationalQuadraticPresentation {
            sigma: &self.sigma + Rational::from_integer(2.into()) * r,
            tau: &self.tau - &self.sigma * r - r * r,
        }
    }

    pub fn negate_generator(&self) -> Self {
        RationalQuadraticPresentation {
            sigma: -self.sigma.clone(),
            tau: self.tau.clone(),
        }
    }
}
