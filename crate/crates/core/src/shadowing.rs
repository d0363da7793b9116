//! Pseudo-orbits, shadowing moduli and exact tracing with certificates.
//!
//! On shift systems the tracing point is the first-symbol concatenation of
//! the pseudo-orbit; on odometers it is the initial point (the +1 map is an
//! isometry for an ultrametric); on products it is computed componentwise.

use num_integer::lcm;

use crate::dyadic::{pow2_exponent, Dyadic};
use crate::error::{Error, Result};
use crate::systems::{io, Point, ProductPoint, Sft, System, UpPoint, Word};

/// A finite or eventually periodic sequence of exact points with a declared
/// jump bound `delta`. With `tail_start = Some(s)` the sequence continues by
/// repeating `points[s..]` forever.
#[derive(Debug, Clone)]
pub struct PseudoOrbit {
    pub points: Vec<Point>,
    pub tail_start: Option<usize>,
    pub delta: Dyadic,
}

impl PseudoOrbit {
    pub fn finite(points: Vec<Point>, delta: Dyadic) -> Self {
        PseudoOrbit { points, tail_start: None, delta }
    }

    pub fn periodic(points: Vec<Point>, delta: Dyadic) -> Self {
        PseudoOrbit { points, tail_start: Some(0), delta }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Element at time `n` of the (possibly infinite) sequence.
    pub fn element(&self, n: usize) -> Option<&Point> {
        if n < self.points.len() {
            return Some(&self.points[n]);
        }
        let s = self.tail_start?;
        let cycle = self.points.len() - s;
        Some(&self.points[s + (n - s) % cycle])
    }

    pub fn render(&self) -> String {
        let mut out = format!("delta={}\n", self.delta);
        match self.tail_start {
            Some(0) => out.push_str("periodic\n"),
            Some(s) => out.push_str(&format!("periodic={s}\n")),
            None => {}
        }
        for p in &self.points {
            out.push_str(&format!("{p}\n"));
        }
        out
    }

    pub fn parse(system: &System, text: &str) -> Result<Self> {
        let mut delta = None;
        let mut tail_start = None;
        let mut points = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            if let Some(v) = line.strip_prefix("delta=") {
                delta = Some(Dyadic::parse(v)?);
            } else if line == "periodic" {
                tail_start = Some(0);
            } else if let Some(v) = line.strip_prefix("periodic=") {
                tail_start = Some(
                    v.parse()
                        .map_err(|_| Error::Parse(format!("bad periodic index {v:?}")))?,
                );
            } else {
                points.push(io::parse_point(system, line)?);
            }
        }
        let delta = delta.ok_or_else(|| Error::Parse("pseudo-orbit missing delta= header".into()))?;
        if let Some(s) = tail_start {
            if s >= points.len() {
                return Err(Error::Parse("periodic index past the end of the body".into()));
            }
        }
        Ok(PseudoOrbit { points, tail_start, delta })
    }
}

/// Checks `d(f(x_n), x_{n+1}) < delta` at every step, including the wrap for
/// periodic data. All points must be valid.
pub fn verify_pseudo_orbit(system: &System, orbit: &PseudoOrbit) -> Result<bool> {
    if orbit.is_empty() {
        return Err(Error::Input("empty pseudo-orbit".into()));
    }
    for p in &orbit.points {
        if !system.validate_point(p) {
            return Ok(false);
        }
    }
    let n = orbit.len();
    for i in 0..n - 1 {
        let image = system.apply_map(&orbit.points[i])?;
        if !system.distance_below(&image, &orbit.points[i + 1], &orbit.delta)? {
            return Ok(false);
        }
    }
    if let Some(s) = orbit.tail_start {
        let image = system.apply_map(&orbit.points[n - 1])?;
        if !system.distance_below(&image, &orbit.points[s], &orbit.delta)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A modulus `delta` such that every `delta`-pseudo-orbit is `eps`-traced by
/// [`trace`]: `eps/2` for shifts, `eps` for odometers, and the
/// componentwise minimum of rescaled factor moduli over the first
/// `D(eps)` factors for products.
pub fn shadowing_modulus(system: &System, eps: &Dyadic) -> Result<Dyadic> {
    let k = pow2_exponent(eps)?;
    Ok(match system {
        System::Sft(_) => Dyadic::pow2(-(k as i64 + 1)),
        System::Odometer(_) => eps.clone(),
        System::Product(_) => {
            // Factor n <= D(eps) = k+2 must be traced at eps/2, which needs a
            // factor-level jump bound of eps/4 seen through its weight 2^{-n}.
            let d = k as i64 + 2;
            Dyadic::pow2(-(k as i64 + 2) - d)
        }
    })
}

/// Record of the per-step tracing inequalities `d(f^n(z), x_n) < eps`.
///
/// For periodic data the recorded horizon covers a full cycle of the exact
/// distance sequence, so the listed inequalities certify every `n`.
#[derive(Debug, Clone)]
pub struct TraceCertificate {
    pub eps: Dyadic,
    pub horizon: usize,
    pub distances: Vec<Dyadic>,
    pub exact: bool,
}

impl TraceCertificate {
    pub fn max_distance(&self) -> Dyadic {
        self.distances.iter().max().cloned().unwrap_or_else(Dyadic::zero)
    }
}

fn first_symbols(points: &[Point]) -> Result<Vec<UpPoint>> {
    points
        .iter()
        .map(|p| match p {
            Point::Sft(x) => Ok(x.clone()),
            _ => Err(Error::TypeMismatch("expected shift points".into())),
        })
        .collect()
}

fn trace_shift_word(points: &[UpPoint], tail_start: Option<usize>) -> Result<UpPoint> {
    let n = points.len();
    let firsts: Vec<_> = points.iter().map(|p| p.symbol_at(0)).collect();
    match tail_start {
        None => {
            let last = &points[n - 1];
            let mut pre = Word::from_symbols(firsts[..n - 1].to_vec());
            pre = pre.concat(last.preperiod());
            UpPoint::new(pre, last.period().clone())
        }
        Some(s) => UpPoint::new(
            Word::from_symbols(firsts[..s].to_vec()),
            Word::from_symbols(firsts[s..].to_vec()),
        ),
    }
}

/// Number of steps after which the pair (f^n(z), x_n) repeats.
fn certificate_horizon(orbit_pre: usize, orbit_cycle: usize, z_pre: usize, z_period: usize) -> usize {
    orbit_pre.max(z_pre) + lcm(orbit_cycle, z_period)
}

/// Traces a verified pseudo-orbit at resolution `eps`, returning the tracing
/// point and the exact per-step distance certificate.
pub fn trace(system: &System, orbit: &PseudoOrbit, eps: &Dyadic) -> Result<(Point, TraceCertificate)> {
    if orbit.is_empty() {
        return Err(Error::Input("empty pseudo-orbit".into()));
    }
    let modulus = shadowing_modulus(system, eps)?;
    if orbit.delta > modulus {
        return Err(Error::Modulus { delta: orbit.delta.to_string(), modulus: modulus.to_string() });
    }
    if !verify_pseudo_orbit(system, orbit)? {
        return Err(Error::Validity("sequence violates its declared delta".into()));
    }

    let z = match system {
        System::Sft(_) => {
            let pts = first_symbols(&orbit.points)?;
            Point::Sft(trace_shift_word(&pts, orbit.tail_start)?)
        }
        System::Odometer(_) => orbit.points[0].clone(),
        System::Product(_) => {
            let arity = match &orbit.points[0] {
                Point::Product(p) => p.components.len(),
                _ => return Err(Error::TypeMismatch("expected product points".into())),
            };
            let mut components = Vec::with_capacity(arity);
            for f in 0..arity {
                let factor_pts: Vec<UpPoint> = orbit
                    .points
                    .iter()
                    .map(|p| match p {
                        Point::Product(pp) => Ok(pp.components[f].clone()),
                        _ => Err(Error::TypeMismatch("expected product points".into())),
                    })
                    .collect::<Result<_>>()?;
                // First-symbol concatenation needs every factor jump below 1/2.
                for i in 0..factor_pts.len() {
                    let next = match orbit.tail_start {
                        _ if i + 1 < factor_pts.len() => Some(&factor_pts[i + 1]),
                        Some(s) => Some(&factor_pts[s]),
                        None => None,
                    };
                    if let Some(next) = next {
                        if !factor_pts[i].shifted().agrees_to_depth(next, 2) {
                            return Err(Error::Modulus {
                                delta: orbit.delta.to_string(),
                                modulus: format!("factor {} jump reaches 1/2", f + 1),
                            });
                        }
                    }
                }
                components.push(trace_shift_word(&factor_pts, orbit.tail_start)?);
            }
            Point::Product(ProductPoint { components })
        }
    };

    if !system.validate_point(&z) {
        return Err(Error::Validity("traced point is not transition-legal".into()));
    }

    // Exact horizon: one full cycle of the distance sequence for periodic
    // data, the whole body otherwise.
    const HORIZON_CAP: usize = 1 << 16;
    let (horizon, exact) = match orbit.tail_start {
        None => (orbit.len(), true),
        Some(s) => {
            let cycle = orbit.len() - s;
            let (z_pre, z_per) = point_eventual_shape(&z, system);
            let h = certificate_horizon(s, cycle, z_pre, z_per);
            if h <= HORIZON_CAP {
                (h, true)
            } else {
                (HORIZON_CAP, false)
            }
        }
    };

    let mut distances = Vec::with_capacity(horizon);
    let mut cur = z.clone();
    for n in 0..horizon {
        let x_n = orbit.element(n).expect("horizon within range");
        let d = system.distance(&cur, x_n)?;
        if &d >= eps {
            return Err(Error::Validity(format!(
                "tracing failed at step {n}: distance {d} >= eps {eps}"
            )));
        }
        distances.push(d);
        if n + 1 < horizon {
            cur = system.apply_map(&cur)?;
        }
    }

    Ok((z, TraceCertificate { eps: eps.clone(), horizon, distances, exact }))
}

/// Eventual shape (preperiod length, period length in time) of the orbit of a
/// point, used to bound certificate horizons.
fn point_eventual_shape(p: &Point, system: &System) -> (usize, usize) {
    match (p, system) {
        (Point::Sft(x), _) => (x.preperiod().len(), x.period().len()),
        (Point::Odometer(_), System::Odometer(o)) => {
            (0, *o.scale().last().expect("nonempty scale") as usize)
        }
        (Point::Product(x), _) => {
            let pre = x.components.iter().map(|c| c.preperiod().len()).max().unwrap_or(0);
            let per = x.components.iter().fold(1usize, |acc, c| lcm(acc, c.period().len()));
            (pre, per)
        }
        _ => (0, 1),
    }
}

/// Freezes a cylinder word to the lexicographically least legal point, the
/// deterministic rule for turning approximate data into exact pseudo-orbit
/// entries.
pub fn freeze_word(sft: &Sft, w: &Word) -> Result<UpPoint> {
    sft.freeze(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::Sft;

    fn up(pre: &str, per: &str) -> UpPoint {
        UpPoint::new(Word::parse(pre).unwrap(), Word::parse(per).unwrap()).unwrap()
    }

    fn full2() -> System {
        System::Sft(Sft::full_shift(2))
    }

    #[test]
    fn exact_orbit_verifies_at_any_delta() {
        let sys = full2();
        let x = up("", "01");
        let pts = vec![Point::Sft(x.clone()), Point::Sft(x.shifted())];
        let orbit = PseudoOrbit::periodic(pts, Dyadic::pow2(-8));
        assert!(verify_pseudo_orbit(&sys, &orbit).unwrap());
    }

    #[test]
    fn delta_condition_is_strict() {
        let sys = full2();
        let pts = vec![Point::Sft(up("", "0")), Point::Sft(up("", "1"))];
        let orbit = PseudoOrbit::finite(pts, Dyadic::pow2(-1));
        // d(sigma 0^inf, 1^inf) = 1, not < 1/2
        assert!(!verify_pseudo_orbit(&sys, &orbit).unwrap());

        let pts = vec![Point::Sft(up("", "0")), Point::Sft(up("000", "1"))];
        let orbit = PseudoOrbit::finite(pts, Dyadic::pow2(-2));
        // d = 2^-3 < 1/4
        assert!(verify_pseudo_orbit(&sys, &orbit).unwrap());
    }

    #[test]
    fn moduli_per_system_kind() {
        assert_eq!(shadowing_modulus(&full2(), &Dyadic::pow2(-3)).unwrap(), Dyadic::pow2(-4));
        let odo = System::Odometer(crate::systems::Odometer::new(vec![2, 4]).unwrap());
        assert_eq!(shadowing_modulus(&odo, &Dyadic::pow2(-2)).unwrap(), Dyadic::pow2(-2));
        let prod = System::Product(
            crate::systems::Product::new(vec![Sft::full_shift(2), Sft::full_shift(2)]).unwrap(),
        );
        // k=1: D = 3, delta = 2^{-3} * 2^{-3}
        assert_eq!(shadowing_modulus(&prod, &Dyadic::pow2(-1)).unwrap(), Dyadic::pow2(-6));
    }

    #[test]
    fn trace_returns_initial_point_on_exact_orbits() {
        let sys = full2();
        let x = up("", "01");
        let pts = vec![Point::Sft(x.clone()), Point::Sft(x.shifted())];
        let orbit = PseudoOrbit::periodic(pts, Dyadic::pow2(-4));
        let (z, cert) = trace(&sys, &orbit, &Dyadic::pow2(-3)).unwrap();
        assert_eq!(z, Point::Sft(x));
        assert!(cert.exact);
        assert!(cert.distances.iter().all(|d| d.is_zero()));
    }

    #[test]
    fn trace_concatenates_first_symbols() {
        let sys = full2();
        let pts = vec![
            Point::Sft(up("", "0")),
            Point::Sft(up("000", "1")),
            Point::Sft(up("00", "1")),
            Point::Sft(up("0", "1")),
            Point::Sft(up("", "1")),
        ];
        let orbit = PseudoOrbit { points: pts, tail_start: Some(4), delta: Dyadic::pow2(-2) };
        let (z, cert) = trace(&sys, &orbit, &Dyadic::pow2(-1)).unwrap();
        assert_eq!(z, Point::Sft(up("0000", "1")));
        // d(sigma z, x_1) = 0
        assert!(cert.distances[1].is_zero());
    }

    #[test]
    fn periodic_golden_mean_trace_is_wrap_legal() {
        let g = Sft::golden_mean();
        let sys = System::Sft(g.clone());
        // period-3 pseudo-orbit following 010 cyclically, exact orbit of (010)^inf
        let x = up("", "010");
        let pts = vec![
            Point::Sft(x.clone()),
            Point::Sft(x.shifted_by(1)),
            Point::Sft(x.shifted_by(2)),
        ];
        let orbit = PseudoOrbit::periodic(pts, Dyadic::pow2(-4));
        let (z, _) = trace(&sys, &orbit, &Dyadic::pow2(-3)).unwrap();
        match z {
            Point::Sft(p) => {
                assert!(g.point_valid(&p));
                assert_eq!(p, x);
            }
            _ => panic!("expected shift point"),
        }
    }

    #[test]
    fn oversized_delta_is_refused() {
        let sys = full2();
        let pts = vec![Point::Sft(up("", "0")); 3];
        let orbit = PseudoOrbit::finite(pts, Dyadic::pow2(-1));
        match trace(&sys, &orbit, &Dyadic::pow2(-1)) {
            Err(Error::Modulus { .. }) => {}
            other => panic!("expected modulus refusal, got {other:?}"),
        }
    }

    #[test]
    fn pseudo_orbit_text_round_trip() {
        let sys = full2();
        let pts = vec![Point::Sft(up("", "0")), Point::Sft(up("000", "1"))];
        let orbit = PseudoOrbit::finite(pts, Dyadic::pow2(-2));
        let parsed = PseudoOrbit::parse(&sys, &orbit.render()).unwrap();
        assert_eq!(parsed.points, orbit.points);
        assert_eq!(parsed.delta, orbit.delta);
        assert_eq!(parsed.tail_start, None);
    }
}
