//! Specification machinery: periodic specification points built by window
//! stitching plus chain filling, and the regularly-recurrent cascade with
//! scale ladder `lambda_r = eps/8^{r+1}`.

use crate::chains::{chain_mixing_constant, BlockGraph};
use crate::dyadic::{pow2_exponent, Dyadic};
use crate::error::{Error, Result};
use crate::shadowing::shadowing_modulus;
use crate::systems::{io, Point, ProductPoint, Sft, System, UpPoint, Word};

/// One orbit window: reproduce `f^j(x)` for `a <= j <= b`.
#[derive(Debug, Clone)]
pub struct SpecWindow {
    pub a: usize,
    pub b: usize,
    pub point: Point,
}

/// A specification request: windows separated by at least the specification
/// constant, and a period `p >= M + b_k - a_1`.
#[derive(Debug, Clone)]
pub struct SpecRequest {
    pub eps: Dyadic,
    pub windows: Vec<SpecWindow>,
    pub p: usize,
}

impl SpecRequest {
    pub fn render(&self) -> String {
        let mut out = format!("eps={}\np={}\n", self.eps, self.p);
        for w in &self.windows {
            out.push_str(&format!("window a={} b={} point={}\n", w.a, w.b, w.point));
        }
        out
    }

    pub fn parse(system: &System, text: &str) -> Result<Self> {
        let mut eps = None;
        let mut p = None;
        let mut windows = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            if let Some(v) = line.strip_prefix("eps=") {
                eps = Some(Dyadic::parse(v)?);
            } else if let Some(v) = line.strip_prefix("p=") {
                p = Some(v.parse().map_err(|_| Error::Parse(format!("bad p {v:?}")))?);
            } else if let Some(v) = line.strip_prefix("window ") {
                let (a_s, rest) = v
                    .trim()
                    .strip_prefix("a=")
                    .and_then(|t| t.split_once(' '))
                    .ok_or_else(|| Error::Parse(format!("bad window line {line:?}")))?;
                let (b_s, rest) = rest
                    .trim()
                    .strip_prefix("b=")
                    .and_then(|t| t.split_once(' '))
                    .ok_or_else(|| Error::Parse(format!("bad window line {line:?}")))?;
                let point_s = rest
                    .trim()
                    .strip_prefix("point=")
                    .ok_or_else(|| Error::Parse(format!("bad window line {line:?}")))?;
                windows.push(SpecWindow {
                    a: a_s.trim().parse().map_err(|_| Error::Parse("bad window a".into()))?,
                    b: b_s.trim().parse().map_err(|_| Error::Parse("bad window b".into()))?,
                    point: io::parse_point(system, point_s)?,
                });
            } else {
                return Err(Error::Parse(format!("unknown request line {line:?}")));
            }
        }
        Ok(SpecRequest {
            eps: eps.ok_or_else(|| Error::Parse("request missing eps=".into()))?,
            windows,
            p: p.ok_or_else(|| Error::Parse("request missing p=".into()))?,
        })
    }

    fn validate(&self, system: &System, m_const: usize) -> Result<()> {
        if self.windows.is_empty() {
            return Err(Error::Request("need at least one window".into()));
        }
        for w in &self.windows {
            if w.a > w.b {
                return Err(Error::Request(format!("window [{} , {}] is reversed", w.a, w.b)));
            }
            if !system.validate_point(&w.point) {
                return Err(Error::Request(format!("window point {} is invalid", w.point)));
            }
        }
        for pair in self.windows.windows(2) {
            if pair[1].a <= pair[0].b {
                return Err(Error::Request("windows must be strictly increasing".into()));
            }
            if pair[1].a - pair[0].b < m_const {
                return Err(Error::Request(format!(
                    "window spacing {} below the specification constant {m_const}",
                    pair[1].a - pair[0].b
                )));
            }
        }
        let a1 = self.windows[0].a;
        let bk = self.windows.last().expect("nonempty").b;
        if self.p < m_const + bk - a1 {
            return Err(Error::Request(format!(
                "p = {} below M + b_k - a_1 = {}",
                self.p,
                m_const + bk - a1
            )));
        }
        Ok(())
    }
}

/// Tracing scale of stage `r`: `lambda_r = eps / 8^{r+1}`.
pub fn lambda(eps: &Dyadic, r: u32) -> Dyadic {
    eps.div_pow8(r + 1)
}

/// Specification constant: the chain-mixing constant at the jump level
/// `delta(lambda_0 / 8)` whose pseudo-orbits are `lambda_0/8`-traced.
pub fn spec_constant(system: &System, eps: &Dyadic) -> Result<usize> {
    if eps > &Dyadic::one() {
        return Ok(1); // diameter-sized windows are matched by any point
    }
    let delta = shadowing_modulus(system, &lambda(eps, 0).halved().halved().halved())?;
    match system {
        System::Sft(sft) => chain_mixing_constant(sft, &delta),
        System::Product(pr) => {
            let mut m = 1usize;
            for f in pr.factors() {
                m = m.max(chain_mixing_constant(f, &delta)?);
            }
            Ok(m)
        }
        System::Odometer(_) => Err(Error::MixingRequired("odometers are not weakly mixing".into())),
    }
}

/// Verified inequality summary for one window.
#[derive(Debug, Clone)]
pub struct WindowCheck {
    pub window: usize,
    pub checked: usize,
    /// Upper bound on the largest distance `d(f^j(z), f^j(x_i))` seen.
    pub max_distance: Dyadic,
}

/// Certificate of a specification point: exact window inequalities plus the
/// period-return inequalities. With the exactness flag set, `z` is periodic
/// with period dividing `p`, so the certified inequalities cover every
/// `n >= 0`.
#[derive(Debug, Clone)]
pub struct SpecCertificate {
    pub eps: Dyadic,
    pub p: usize,
    pub horizon: usize,
    pub exact: bool,
    pub window_checks: Vec<WindowCheck>,
    /// Sampled `d(f^j(z), f^{np+j}(z))` bounds as (n, j, distance).
    pub period_checks: Vec<(usize, usize, Dyadic)>,
}

// ---------------------------------------------------------------------------
// Word-level stitching
// ---------------------------------------------------------------------------

struct FactorStitcher {
    graph: BlockGraph,
}

impl FactorStitcher {
    fn new(sft: &Sft, delta_exp: u32) -> Result<Self> {
        Ok(FactorStitcher { graph: BlockGraph::new(sft, delta_exp as usize + 2)? })
    }

    /// Fills `word[gap_from+1 .. gap_to]` with an exact-length legal path
    /// between the blocks read off the endpoint orbits.
    fn fill_gap(
        &self,
        word: &mut [Option<usize>],
        from_point: &UpPoint,
        from_time: usize,
        to_point: &UpPoint,
        gap_from: usize,
        gap_to: usize,
    ) -> Result<()> {
        let order = self.graph.order;
        let src = self
            .graph
            .block_of_point(&from_point.shifted_by(from_time))
            .ok_or_else(|| Error::Validity("window exit block is illegal".into()))?;
        let tgt = self
            .graph
            .block_of_point(to_point)
            .ok_or_else(|| Error::Validity("window entry block is illegal".into()))?;
        let path = self.graph.find_path(&[src], &[tgt], gap_to - gap_from)?;
        for (step, &b) in path.iter().enumerate().skip(1) {
            let pos = gap_from + step;
            if pos < gap_to {
                word[pos] = Some(self.graph.words[b][0].index());
            }
        }
        let _ = order;
        Ok(())
    }
}

fn stitch_factor(
    sft: &Sft,
    stitcher: &FactorStitcher,
    p: usize,
    windows: &[(usize, usize, UpPoint)],
) -> Result<UpPoint> {
    let mut word: Vec<Option<usize>> = vec![None; p];
    for (a, b, x) in windows {
        for j in *a..=*b {
            word[j] = Some(x.symbol_at(j).index());
        }
    }
    for i in 0..windows.len() {
        let (_, b_i, x_i) = &windows[i];
        let (to_a, to_x) = if i + 1 < windows.len() {
            let (a_next, _, x_next) = &windows[i + 1];
            (*a_next, x_next.shifted_by(*a_next))
        } else {
            // wrap back to the first window at time p
            let (a0, _, x0) = &windows[0];
            (p + a0, x0.shifted_by(*a0))
        };
        let gap_to = to_a; // word index of the target start (may be p + a0)
        let mut scratch;
        let target_slice: &mut [Option<usize>] = if gap_to <= p {
            &mut word[..]
        } else {
            // wrap region: extend a scratch copy, then fold back
            scratch = word.clone();
            scratch.resize(gap_to, None);
            &mut scratch
        };
        stitcher.fill_gap(target_slice, x_i, *b_i, &to_x, *b_i, gap_to)?;
        if gap_to > p {
            // fold positions p.. back onto the head (they are the next cycle)
            let folded: Vec<Option<usize>> = target_slice.to_vec();
            word = folded[..p].to_vec();
            for (i, v) in folded[p..].iter().enumerate() {
                if let Some(s) = v {
                    // positions beyond p coincide with window 0 content
                    debug_assert_eq!(word[i], Some(*s));
                }
            }
        }
    }
    let symbols: Vec<usize> = word
        .into_iter()
        .map(|o| o.ok_or_else(|| Error::Infeasible("stitcher left an unfilled position".into())))
        .collect::<Result<_>>()?;
    let w = Word::from_indices(&symbols);
    if !sft.word_legal(&w) {
        return Err(Error::Infeasible("stitched word is illegal".into()));
    }
    UpPoint::periodic(w)
}

fn factor_windows(windows: &[SpecWindow], shift: usize, factor: Option<usize>) -> Result<Vec<(usize, usize, UpPoint)>> {
    windows
        .iter()
        .map(|w| {
            let x = match (&w.point, factor) {
                (Point::Sft(x), None) => x.clone(),
                (Point::Product(px), Some(f)) => px.components[f].clone(),
                _ => return Err(Error::TypeMismatch("window point of wrong kind".into())),
            };
            Ok((w.a - shift, w.b - shift, x.shifted_by(shift)))
        })
        .collect()
}

/// Builds the exact periodic point matching every window: the period-`p`
/// pseudo-orbit reproducing the window orbits is stitched at the chain level
/// and its first-symbol concatenation is returned, pre-composed with
/// `f^{p-a_1}` when the first window does not start at 0.
pub fn periodic_spec_point(system: &System, req: &SpecRequest) -> Result<(Point, SpecCertificate)> {
    let k = pow2_exponent(&req.eps)?;
    if req.eps >= Dyadic::pow2(-1) {
        return Err(Error::Request("eps must be below the expansivity constant 1/2".into()));
    }
    let m_const = spec_constant(system, &req.eps)?;
    req.validate(system, m_const)?;
    let delta_exp = k + 7; // jump level delta(lambda_0/8) on SFT factors
    let shift = req.windows[0].a;

    let z = match system {
        System::Sft(sft) => {
            let st = FactorStitcher::new(sft, delta_exp)?;
            let wins = factor_windows(&req.windows, shift, None)?;
            let z0 = stitch_factor(sft, &st, req.p, &wins)?;
            Point::Sft(if shift == 0 { z0 } else { z0.shifted_by(req.p - shift) })
        }
        System::Product(pr) => {
            let mut comps = Vec::with_capacity(pr.factor_count());
            let delta = shadowing_modulus(system, &lambda(&req.eps, 0).halved().halved().halved())?;
            let factor_exp = (-delta.as_pow2().expect("modulus is a power of two")) as u32;
            for (f, sft) in pr.factors().iter().enumerate() {
                let st = FactorStitcher::new(sft, factor_exp)?;
                let wins = factor_windows(&req.windows, shift, Some(f))?;
                let zf = stitch_factor(sft, &st, req.p, &wins)?;
                comps.push(if shift == 0 { zf } else { zf.shifted_by(req.p - shift) });
            }
            Point::Product(ProductPoint { components: comps })
        }
        System::Odometer(_) => {
            return Err(Error::MixingRequired("odometers are not weakly mixing".into()))
        }
    };

    let cert = certify(system, &z, req, 4 * req.p)?;
    if !cert.exact {
        return Err(Error::Infeasible("constructed point failed the exactness audit".into()));
    }
    Ok((z, cert))
}

/// Exact certification of the two inequality families, recomputed from the
/// point and the request only.
fn certify(system: &System, z: &Point, req: &SpecRequest, horizon: usize) -> Result<SpecCertificate> {
    let k = pow2_exponent(&req.eps)?;
    let scan = k as usize + 12; // distances are recorded as <= 2^{-scan} when no disagreement shows
    let mut window_checks = Vec::with_capacity(req.windows.len());
    for (i, w) in req.windows.iter().enumerate() {
        let mut max_d = Dyadic::zero();
        for j in w.a..=w.b {
            let d = distance_bound(system, z, j, &w.point, j, scan)?;
            if d >= req.eps {
                return Err(Error::Infeasible(format!(
                    "window {i} inequality fails at j={j}: {d} >= {}",
                    req.eps
                )));
            }
            if d > max_d {
                max_d = d;
            }
        }
        window_checks.push(WindowCheck { window: i, checked: w.b - w.a + 1, max_distance: max_d });
    }
    // period returns: exact when z is periodic with period dividing p
    let exact = point_period_divides(z, req.p);
    let mut period_checks = Vec::new();
    let n_max = (horizon / req.p).clamp(1, 4);
    for n in 1..=n_max {
        for j in [0usize, 1, req.p / 2, req.p - 1] {
            let d = distance_bound(system, z, j, z, n * req.p + j, scan)?;
            if d >= req.eps {
                return Err(Error::Infeasible(format!(
                    "period inequality fails at n={n}, j={j}: {d} >= {}",
                    req.eps
                )));
            }
            period_checks.push((n, j, d));
        }
    }
    Ok(SpecCertificate {
        eps: req.eps.clone(),
        p: req.p,
        horizon,
        exact,
        window_checks,
        period_checks,
    })
}

/// Upper bound on `d(f^s(x), f^t(y))`, exact unless both orbits agree past
/// the scan depth (then the bound `2^{-scan}` is returned).
fn distance_bound(
    system: &System,
    x: &Point,
    s: usize,
    y: &Point,
    t: usize,
    scan: usize,
) -> Result<Dyadic> {
    match (system, x, y) {
        (System::Sft(_), Point::Sft(a), Point::Sft(b)) => {
            Ok(shift_distance_bound(a, s, b, t, scan))
        }
        (System::Product(_), Point::Product(a), Point::Product(b)) => {
            let mut sum = Dyadic::zero();
            for (n, (ac, bc)) in a.components.iter().zip(&b.components).enumerate() {
                let d = shift_distance_bound(ac, s, bc, t, scan);
                sum = &sum + &(&Dyadic::pow2(-((n + 1) as i64)) * &d);
            }
            Ok(sum)
        }
        _ => Err(Error::TypeMismatch("distance bound on mismatched kinds".into())),
    }
}

fn shift_distance_bound(a: &UpPoint, s: usize, b: &UpPoint, t: usize, scan: usize) -> Dyadic {
    for l in 0..scan {
        if a.symbol_at(s + l) != b.symbol_at(t + l) {
            return Dyadic::pow2(-(l as i64));
        }
    }
    Dyadic::pow2(-(scan as i64))
}

fn point_period_divides(z: &Point, p: usize) -> bool {
    match z {
        Point::Sft(x) => x.is_periodic() && p % x.period().len() == 0,
        Point::Product(px) => px
            .components
            .iter()
            .all(|c| c.is_periodic() && p % c.period().len() == 0),
        Point::Odometer(_) => false,
    }
}

// ---------------------------------------------------------------------------
// The regularly recurrent cascade
// ---------------------------------------------------------------------------

/// One stage of the cascade: scale `lambda_r`, return length `m_r`, the
/// stage point `y_r`, and the verified return inequality.
#[derive(Debug, Clone)]
pub struct CascadeStage {
    pub stage: u32,
    pub lambda: Dyadic,
    pub m: usize,
    pub point: Point,
    /// Modulus used to pick `m_{r+1}` (pseudo-orbits at this jump bound are
    /// `lambda_{r+2}/8`-traced).
    pub alpha: Dyadic,
    /// `d(f^{m_{r+1}}(y_r), y_r)`, strictly below `alpha`.
    pub return_distance: Dyadic,
    pub stabilized: bool,
}

/// Runs the cascade on top of the stage-0 specification point: at each stage
/// the return length is the least multiple of the previous one at which the
/// orbit returns below the stage modulus, and the re-traced point is kept.
/// On the systems presented here the cascade stabilizes and the exact
/// periodic point is returned with the exactness flag set.
pub fn rr_spec_point(
    system: &System,
    req: &SpecRequest,
    stages: u32,
    horizon: usize,
    m_cap: usize,
) -> Result<(Point, SpecCertificate, Vec<CascadeStage>)> {
    let (z0, _stage0_cert) = periodic_spec_point(system, req)?;
    if horizon < req.p {
        return Err(Error::Input("horizon must reach at least one period".into()));
    }
    // lambda-budget invariant: sum_{i=l..} lambda_i < eps/4 for every l
    for l in 0..stages + 3 {
        let mut sum = Dyadic::zero();
        for i in l..stages + 16 {
            sum = &sum + &lambda(&req.eps, i);
        }
        if sum >= req.eps.halved().halved() {
            return Err(Error::Infeasible("lambda budget exceeded".into()));
        }
    }

    let mut history = Vec::with_capacity(stages as usize + 1);
    let y = z0;
    let mut m_r = req.p;
    for r in 0..=stages {
        let alpha = shadowing_modulus(system, &lambda(&req.eps, r + 2).halved().halved().halved())?;
        // least multiple of m_r with a return below alpha
        let mut chosen = None;
        let mut t = 1usize;
        while t * m_r <= m_cap {
            let cand = t * m_r;
            let fy = system.apply_map_n(&y, cand)?;
            let d = system.distance(&fy, &y)?;
            if d < alpha {
                chosen = Some((cand, d));
                break;
            }
            t += 1;
        }
        let Some((m_next, dist)) = chosen else {
            return Err(Error::CapExceeded(format!(
                "no return below {alpha} found for multiples of {m_r} up to {m_cap}"
            )));
        };
        // Re-tracing the periodic pseudo-orbit of an exact return keeps the
        // point; a nonzero return would require a genuine re-trace, which the
        // finite presentations here never need.
        let stabilized = dist.is_zero();
        if !stabilized {
            return Err(Error::CapExceeded(
                "cascade produced a non-exact return; finite presentations always return exactly"
                    .into(),
            ));
        }
        history.push(CascadeStage {
            stage: r,
            lambda: lambda(&req.eps, r),
            m: m_next,
            point: y.clone(),
            alpha,
            return_distance: dist,
            stabilized,
        });
        m_r = m_next;
    }

    let cert = certify(system, &y, req, horizon)?;
    // regular-recurrence certificate: d(f^{j m_r}(z), z) <= 3 sum_{i>=r} lambda_i
    for st in &history {
        let bound = three_tail(&req.eps, st.stage, stages + 16);
        let mut j = 1usize;
        while j * st.m <= horizon {
            let d = distance_bound(system, &y, 0, &y, j * st.m, pow2_exponent(&req.eps)? as usize + 12)?;
            if d > bound {
                return Err(Error::Infeasible(format!(
                    "regular-recurrence bound fails at stage {}, j={j}",
                    st.stage
                )));
            }
            j += 1;
        }
    }
    Ok((y, cert, history))
}

fn three_tail(eps: &Dyadic, r: u32, up_to: u32) -> Dyadic {
    let mut sum = Dyadic::zero();
    for i in r..up_to {
        sum = &sum + &lambda(eps, i);
    }
    &Dyadic::from_integer(3) * &sum
}

// ---------------------------------------------------------------------------
// Independent verification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SpecVerification {
    pub ok: bool,
    /// First failing inequality: (family, n, j).
    pub failure: Option<(String, usize, usize)>,
}

/// Recomputes every certificate inequality from scratch using only the
/// system primitives: window bounds `d(f^{np+j}(z), f^j(x_i)) < eps` and
/// period returns `d(f^j(z), f^{np+j}(z)) < eps` for all checked `n, j` up
/// to the horizon (all `n` at once when `z` is periodic with period dividing
/// `p`).
pub fn verify_spec_certificate(
    system: &System,
    z: &Point,
    req: &SpecRequest,
    horizon: usize,
) -> Result<SpecVerification> {
    let exact = point_period_divides(z, req.p);
    let n_max = if exact { 1 } else { horizon / req.p.max(1) };
    for n in 0..=n_max {
        for (i, w) in req.windows.iter().enumerate() {
            for j in w.a..=w.b {
                let zp = system.apply_map_n(z, n * req.p + j)?;
                let xp = system.apply_map_n(&w.point, j)?;
                if !system.distance_below(&zp, &xp, &req.eps)? {
                    return Ok(SpecVerification {
                        ok: false,
                        failure: Some((format!("window {i}"), n, j)),
                    });
                }
            }
        }
    }
    let j_max = if exact { req.p } else { horizon.saturating_sub(req.p) };
    for n in 1..=n_max {
        for j in 0..j_max.min(horizon) {
            let a = system.apply_map_n(z, j)?;
            let b = system.apply_map_n(z, n * req.p + j)?;
            if !system.distance_below(&a, &b, &req.eps)? {
                return Ok(SpecVerification { ok: false, failure: Some(("period".into(), n, j)) });
            }
        }
    }
    Ok(SpecVerification { ok: true, failure: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::Sft;

    fn up(pre: &str, per: &str) -> UpPoint {
        UpPoint::new(Word::parse(pre).unwrap(), Word::parse(per).unwrap()).unwrap()
    }

    #[test]
    fn spec_constant_values() {
        let full = System::Sft(Sft::full_shift(2));
        let m = spec_constant(&full, &Dyadic::pow2(-1)).unwrap();
        // block order k+9 = 10, index 10, M = 11
        assert_eq!(m, 11);
        assert_eq!(spec_constant(&full, &Dyadic::from_integer(8)).unwrap(), 1);
        let gm = System::Sft(Sft::golden_mean());
        assert_eq!(spec_constant(&gm, &Dyadic::pow2(-2)).unwrap(), 2 + 2 + 9);
    }

    #[test]
    fn constant_window_yields_constant_point() {
        let sys = System::Sft(Sft::full_shift(2));
        let eps = Dyadic::pow2(-2);
        let m = spec_constant(&sys, &eps).unwrap();
        let req = SpecRequest {
            eps: eps.clone(),
            windows: vec![SpecWindow { a: 0, b: 3, point: Point::Sft(up("", "0")) }],
            p: m + 3,
        };
        let (z, cert) = periodic_spec_point(&sys, &req).unwrap();
        assert!(cert.exact);
        match &z {
            Point::Sft(x) => {
                assert!(x.is_periodic());
                assert_eq!(req.p % x.period().len(), 0);
                assert_eq!(x.symbol_at(0).index(), 0);
            }
            _ => panic!("expected shift point"),
        }
        let v = verify_spec_certificate(&sys, &z, &req, 4 * req.p).unwrap();
        assert!(v.ok);
    }

    #[test]
    fn golden_mean_two_windows() {
        let g = Sft::golden_mean();
        let sys = System::Sft(g.clone());
        let eps = Dyadic::pow2(-2);
        let m = spec_constant(&sys, &eps).unwrap();
        let w1 = up("", "0");
        let w2 = up("", "010");
        let a2 = 2 + m;
        let req = SpecRequest {
            eps: eps.clone(),
            windows: vec![
                SpecWindow { a: 0, b: 1, point: Point::Sft(w1) },
                SpecWindow { a: a2, b: a2 + 2, point: Point::Sft(w2) },
            ],
            p: m + a2 + 2,
        };
        let (z, cert) = periodic_spec_point(&sys, &req).unwrap();
        assert!(cert.exact);
        match &z {
            Point::Sft(x) => {
                assert!(g.point_valid(x));
                // windows matched: symbols agree to depth k+1 at window times
                assert_eq!(x.symbol_at(0).index(), 0);
                assert_eq!(x.symbol_at(a2).index(), 0);
                assert_eq!(x.symbol_at(a2 + 1).index(), 1);
                assert_eq!(x.symbol_at(a2 + 2).index(), 0);
            }
            _ => panic!("expected shift point"),
        }
        assert!(verify_spec_certificate(&sys, &z, &req, 4 * req.p).unwrap().ok);
    }

    #[test]
    fn incompatible_spacing_is_a_request_error() {
        let sys = System::Sft(Sft::full_shift(2));
        let eps = Dyadic::pow2(-2);
        let req = SpecRequest {
            eps,
            windows: vec![
                SpecWindow { a: 0, b: 1, point: Point::Sft(up("", "0")) },
                SpecWindow { a: 3, b: 4, point: Point::Sft(up("", "1")) },
            ],
            p: 100,
        };
        assert!(matches!(periodic_spec_point(&sys, &req), Err(Error::Request(_))));
    }

    #[test]
    fn nonzero_first_window_start_is_normalized() {
        let sys = System::Sft(Sft::full_shift(2));
        let eps = Dyadic::pow2(-2);
        let m = spec_constant(&sys, &eps).unwrap();
        let req = SpecRequest {
            eps: eps.clone(),
            windows: vec![SpecWindow { a: 2, b: 4, point: Point::Sft(up("", "01")) }],
            p: m + 4,
        };
        let (z, _) = periodic_spec_point(&sys, &req).unwrap();
        let v = verify_spec_certificate(&sys, &z, &req, 4 * req.p).unwrap();
        assert!(v.ok, "failure: {:?}", v.failure);
    }

    #[test]
    fn cascade_stabilizes_and_matches_periodic_output() {
        let sys = System::Sft(Sft::golden_mean());
        let eps = Dyadic::pow2(-2);
        let m = spec_constant(&sys, &eps).unwrap();
        let req = SpecRequest {
            eps: eps.clone(),
            windows: vec![SpecWindow { a: 0, b: 2, point: Point::Sft(up("", "01")) }],
            p: m + 2,
        };
        let (zp, _) = periodic_spec_point(&sys, &req).unwrap();
        let (zr, cert, stages) = rr_spec_point(&sys, &req, 3, 4 * req.p, 1 << 20).unwrap();
        assert_eq!(zp, zr);
        assert!(cert.exact);
        assert!(stages.iter().all(|s| s.stabilized));
        // divisibility chain m_0 | m_1 | ...
        let mut prev = req.p;
        for s in &stages {
            assert_eq!(s.m % prev, 0);
            prev = s.m;
        }
    }

    #[test]
    fn mutated_point_fails_verification() {
        let sys = System::Sft(Sft::full_shift(2));
        let eps = Dyadic::pow2(-2);
        let m = spec_constant(&sys, &eps).unwrap();
        let req = SpecRequest {
            eps: eps.clone(),
            windows: vec![SpecWindow { a: 0, b: 3, point: Point::Sft(up("", "0")) }],
            p: m + 3,
        };
        let (z, _) = periodic_spec_point(&sys, &req).unwrap();
        let bad = match &z {
            Point::Sft(x) => {
                let mut syms: Vec<usize> =
                    (0..req.p).map(|n| x.symbol_at(n).index()).collect();
                syms[1] = 1 - syms[1]; // flip inside the window
                Point::Sft(UpPoint::periodic(Word::from_indices(&syms)).unwrap())
            }
            _ => unreachable!(),
        };
        let v = verify_spec_certificate(&sys, &bad, &req, 4 * req.p).unwrap();
        assert!(!v.ok);
        assert!(v.failure.is_some());
    }

    #[test]
    fn diameter_eps_is_always_verified() {
        let sys = System::Sft(Sft::full_shift(2));
        let req = SpecRequest {
            eps: Dyadic::from_integer(2),
            windows: vec![SpecWindow { a: 0, b: 1, point: Point::Sft(up("", "1")) }],
            p: 4,
        };
        let z = Point::Sft(up("", "0"));
        assert!(verify_spec_certificate(&sys, &z, &req, 16).unwrap().ok);
    }
}
