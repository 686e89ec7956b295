use crate::geometry::Point;
use crate::{Error, Vec3};
use std::collections::BTreeMap;

/// Exponents of `t^{a0} x^{ax} v^{av}`; entries beyond the dimension stay zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct KMultiIndex {
    pub a0: u32,
    pub ax: [u32; 3],
    pub av: [u32; 3],
}

impl KMultiIndex {
    pub fn constant() -> Self {
        Self::default()
    }

    pub fn t() -> Self {
        Self { a0: 1, ..Self::default() }
    }

    pub fn x(i: usize) -> Self {
        let mut m = Self::default();
        m.ax[i] = 1;
        m
    }

    pub fn v(i: usize) -> Self {
        let mut m = Self::default();
        m.av[i] = 1;
        m
    }

    /// `v_i v_j` (`v_i²` when `i == j`).
    pub fn vv(i: usize, j: usize) -> Self {
        let mut m = Self::default();
        m.av[i] += 1;
        m.av[j] += 1;
        m
    }

    pub fn eval(&self, z: &Point) -> f64 {
        let mut p = z.t.powi(self.a0 as i32);
        for i in 0..3 {
            p *= z.x[i].powi(self.ax[i] as i32) * z.v[i].powi(self.av[i] as i32);
        }
        p
    }
}

/// `2s·a0 + (1+2s)·|ax| + |av|`.
pub fn kdeg(m: &KMultiIndex, s: f64) -> f64 {
    let ax: u32 = m.ax.iter().sum();
    let av: u32 = m.av.iter().sum();
    2.0 * s * m.a0 as f64 + (1.0 + 2.0 * s) * ax as f64 + av as f64
}

/// Polynomial in local coordinates `ξ = z0^{-1} ∘ z`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KPolynomial {
    pub terms: BTreeMap<KMultiIndex, f64>,
    pub s: f64,
}

impl KPolynomial {
    pub fn zero(s: f64) -> Self {
        Self { terms: BTreeMap::new(), s }
    }

    pub fn add(&mut self, m: KMultiIndex, c: f64) {
        *self.terms.entry(m).or_insert(0.0) += c;
    }

    pub fn coefficient(&self, m: &KMultiIndex) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    /// Largest kinetic degree among nonzero terms; `-∞` for the zero polynomial.
    pub fn degree(&self) -> f64 {
        self.terms.iter().filter(|(_, c)| **c != 0.0).map(|(m, _)| kdeg(m, self.s)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn eval(&self, xi: &Point) -> f64 {
        self.terms.iter().map(|(m, c)| c * m.eval(xi)).sum()
    }
}

fn richardson(d: impl Fn(f64) -> f64, h: f64) -> f64 {
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// Taylor polynomial of `f` at `z0` keeping the monomials of kinetic degree below `alpha`:
/// the constant, `ξ_v` if `alpha > 1`, `ξ_t` (material derivative) if `alpha > 2s`, and
/// `ξ_v ξ_v / 2` if `alpha > 2`.
///
/// First derivatives are central differences with one Richardson step; the material derivative
/// moves along `z0 ∘ (±h, 0, 0)`, which follows the drift.
pub fn taylor_expansion<F: Fn(&Point) -> f64>(
    f: &F,
    z0: &Point,
    alpha: f64,
    s: f64,
    d: usize,
    h: f64,
) -> Result<KPolynomial, Error> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Holder(format!("finite-difference step must be positive, got {h}")));
    }
    if alpha > 2.0 + 2.0 * s + 1e-12 {
        return Err(Error::Holder(format!("expansion order {alpha} exceeds 2 + 2s")));
    }
    let mut p = KPolynomial::zero(s);
    let f0 = f(z0);
    p.add(KMultiIndex::constant(), f0);
    let at = |xi: Point| f(&z0.compose(&xi));
    let unit = |i: usize| Vec3::from_fn(|j, _| if i == j { 1.0 } else { 0.0 });
    if alpha > 2.0 * s {
        let dt = |h: f64| {
            (at(Point::new(h, Vec3::zeros(), Vec3::zeros())) - at(Point::new(-h, Vec3::zeros(), Vec3::zeros())))
                / (2.0 * h)
        };
        p.add(KMultiIndex::t(), richardson(dt, h));
    }
    if alpha > 1.0 {
        for i in 0..d {
            let e = unit(i);
            let dv = |h: f64| (at(Point::velocity(e * h)) - at(Point::velocity(-e * h))) / (2.0 * h);
            p.add(KMultiIndex::v(i), richardson(dv, h));
        }
    }
    if alpha > 2.0 {
        for i in 0..d {
            for j in i..d {
                let (ei, ej) = (unit(i), unit(j));
                let c = if i == j {
                    (at(Point::velocity(ei * h)) - 2.0 * f0 + at(Point::velocity(-ei * h))) / (h * h) / 2.0
                } else {
                    (at(Point::velocity((ei + ej) * h))
                        - at(Point::velocity((ei - ej) * h))
                        - at(Point::velocity((ej - ei) * h))
                        + at(Point::velocity(-(ei + ej) * h)))
                        / (4.0 * h * h)
                };
                p.add(KMultiIndex::vv(i, j), c);
            }
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees() {
        assert_eq!(kdeg(&KMultiIndex::constant(), 0.3), 0.0);
        let mut m = KMultiIndex::t();
        m.ax[0] = 1;
        assert_eq!(kdeg(&m, 0.5), 3.0);
        assert_eq!(kdeg(&KMultiIndex::vv(0, 0), 0.77), 2.0);
        assert_eq!(KPolynomial::zero(0.5).degree(), f64::NEG_INFINITY);
    }

    #[test]
    fn expansions_of_simple_functions() {
        let z0 = Point::new(-0.3, Vec3::new(0.1, 0.2, 0.0), Vec3::new(0.0, 0.4, -0.2));
        let p = taylor_expansion(&|_: &Point| 2.5, &z0, 2.5, 0.5, 3, 1e-3).unwrap();
        assert!(p.terms.iter().all(|(m, c)| *m == KMultiIndex::constant() || c.abs() < 1e-8));
        let p = taylor_expansion(&|z: &Point| z.v.x, &z0, 1.5, 0.5, 3, 1e-3).unwrap();
        assert!((p.coefficient(&KMultiIndex::v(0)) - 1.0).abs() < 1e-6);
        let z0 = Point::new(-0.3, Vec3::zeros(), Vec3::zeros());
        let p = taylor_expansion(&|z: &Point| z.t, &z0, 1.5, 0.5, 3, 1e-3).unwrap();
        assert!((p.coefficient(&KMultiIndex::t()) - 1.0).abs() < 1e-6);
        // The material derivative of x1 is v1.
        let z0 = Point::new(0.0, Vec3::zeros(), Vec3::new(0.7, 0.0, 0.0));
        let p = taylor_expansion(&|z: &Point| z.x.x, &z0, 1.2, 0.25, 3, 1e-3).unwrap();
        assert!((p.coefficient(&KMultiIndex::t()) - 0.7).abs() < 1e-9);
    }
}
