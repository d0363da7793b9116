//! Plain-text certificates and their independent replay.
//!
//! Every construction writes a certificate holding the system, the inputs,
//! the output and the asserted inequalities in exact numerals. `replay`
//! re-derives every inequality from the data using only the system
//! primitives, so a third party can re-check a run with integer arithmetic
//! alone.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::measures::{cylinder_mass, parse_rat, rat_str, MeasureRepr};
use crate::shadowing::PseudoOrbit;
use crate::specification::{verify_spec_certificate, SpecRequest};
use crate::systems::{io, Point, System, Word};

#[derive(Debug, Clone)]
pub enum Certificate {
    Trace { system: System, orbit: PseudoOrbit, eps: Dyadic, z: Point },
    Chain { system: System, eps: Dyadic, words: Vec<Word> },
    Spec { system: System, request: SpecRequest, horizon: usize, z: Point },
    Embedding {
        system: System,
        m: usize,
        r: usize,
        eps: Dyadic,
        common: usize,
        anchors: Vec<Word>,
        probes: Vec<Word>,
        targets: Vec<Word>,
    },
    Distance {
        alphabet: usize,
        mu: MeasureRepr,
        nu: MeasureRepr,
        lo: BigRational,
        hi: BigRational,
        terms: usize,
    },
}

#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub ok: bool,
    pub detail: String,
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

fn render_system_lines(system: &System) -> String {
    io::render_system(system)
        .lines()
        .map(|l| format!("system {l}\n"))
        .collect()
}

impl Certificate {
    pub fn render(&self) -> String {
        match self {
            Certificate::Trace { system, orbit, eps, z } => {
                let mut out = String::from("certificate trace\n");
                out.push_str(&render_system_lines(system));
                out.push_str(&format!("eps={eps}\n"));
                out.push_str(&format!("delta={}\n", orbit.delta));
                match orbit.tail_start {
                    Some(0) => out.push_str("periodic\n"),
                    Some(s) => out.push_str(&format!("periodic={s}\n")),
                    None => {}
                }
                for p in &orbit.points {
                    out.push_str(&format!("point {p}\n"));
                }
                out.push_str(&format!("z {z}\n"));
                out
            }
            Certificate::Chain { system, eps, words } => {
                let mut out = String::from("certificate chain\n");
                out.push_str(&render_system_lines(system));
                out.push_str(&format!("eps={eps}\n"));
                for w in words {
                    out.push_str(&format!("word {w}\n"));
                }
                out
            }
            Certificate::Spec { system, request, horizon, z } => {
                let mut out = String::from("certificate spec\n");
                out.push_str(&render_system_lines(system));
                for line in request.render().lines() {
                    out.push_str(line);
                    out.push('\n');
                }
                out.push_str(&format!("horizon={horizon}\n"));
                out.push_str(&format!("z {z}\n"));
                out
            }
            Certificate::Embedding { system, m, r, eps, common, anchors, probes, targets } => {
                let mut out = String::from("certificate embedding\n");
                out.push_str(&render_system_lines(system));
                out.push_str(&format!("m={m}\nr={r}\neps={eps}\ncommon={common}\n"));
                for (i, a) in anchors.iter().enumerate() {
                    out.push_str(&format!("anchor {i}={a}\n"));
                }
                for (i, p) in probes.iter().enumerate() {
                    out.push_str(&format!("probe {i}={p}\n"));
                }
                for (i, t) in targets.iter().enumerate() {
                    out.push_str(&format!("target {i}={t}\n"));
                }
                out
            }
            Certificate::Distance { alphabet, mu, nu, lo, hi, terms } => {
                let mut out = String::from("certificate distance\n");
                out.push_str(&format!("alphabet={alphabet}\n"));
                out.push_str(&format!("mu {}", mu.render()));
                out.push_str(&format!("nu {}", nu.render()));
                out.push_str(&format!("lo={}\nhi={}\nterms={terms}\n", rat_str(lo), rat_str(hi)));
                out
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Lines<'a> {
    all: Vec<&'a str>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            all: text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .collect(),
        }
    }

    fn system(&self) -> Result<System> {
        let block: String = self
            .all
            .iter()
            .filter_map(|l| l.strip_prefix("system "))
            .map(|l| format!("{l}\n"))
            .collect();
        if block.is_empty() {
            return Err(Error::Parse("certificate missing system block".into()));
        }
        io::parse_system(&block, &|name| {
            Err(Error::Parse(format!("certificates must inline systems, got file {name}")))
        })
    }

    fn value(&self, key: &str) -> Option<&'a str> {
        let prefix = format!("{key}=");
        self.all.iter().find_map(|l| l.strip_prefix(prefix.as_str()))
    }

    fn required(&self, key: &str) -> Result<&'a str> {
        self.value(key)
            .ok_or_else(|| Error::Parse(format!("certificate missing {key}=")))
    }

    fn indexed(&self, key: &str) -> Vec<(usize, &'a str)> {
        let prefix = format!("{key} ");
        let mut out = Vec::new();
        for l in &self.all {
            if let Some(rest) = l.strip_prefix(prefix.as_str()) {
                if let Some((i, v)) = rest.split_once('=') {
                    if let Ok(idx) = i.trim().parse() {
                        out.push((idx, v));
                    }
                }
            }
        }
        out.sort_by_key(|&(i, _)| i);
        out
    }

    fn tagged(&self, tag: &str) -> Vec<&'a str> {
        let prefix = format!("{tag} ");
        self.all
            .iter()
            .filter_map(|l| l.strip_prefix(prefix.as_str()))
            .collect()
    }
}

pub fn parse(text: &str) -> Result<Certificate> {
    let lines = Lines::new(text);
    let head = lines
        .all
        .first()
        .ok_or_else(|| Error::Parse("empty certificate".into()))?;
    let kind = head
        .strip_prefix("certificate ")
        .ok_or_else(|| Error::Parse("first line must be `certificate <kind>`".into()))?;
    match kind.trim() {
        "trace" => {
            let system = lines.system()?;
            let eps = Dyadic::parse(lines.required("eps")?)?;
            let delta = Dyadic::parse(lines.required("delta")?)?;
            let tail_start = if lines.all.iter().any(|l| *l == "periodic") {
                Some(0)
            } else {
                lines
                    .value("periodic")
                    .map(|v| v.parse().map_err(|_| Error::Parse("bad periodic index".into())))
                    .transpose()?
            };
            let points = lines
                .tagged("point")
                .into_iter()
                .map(|l| io::parse_point(&system, l))
                .collect::<Result<Vec<_>>>()?;
            let z = io::parse_point(
                &system,
                lines
                    .tagged("z")
                    .first()
                    .ok_or_else(|| Error::Parse("trace certificate missing z".into()))?,
            )?;
            Ok(Certificate::Trace {
                system,
                orbit: PseudoOrbit { points, tail_start, delta },
                eps,
                z,
            })
        }
        "chain" => {
            let system = lines.system()?;
            let eps = Dyadic::parse(lines.required("eps")?)?;
            let words = lines
                .tagged("word")
                .into_iter()
                .map(Word::parse)
                .collect::<Result<Vec<_>>>()?;
            Ok(Certificate::Chain { system, eps, words })
        }
        "spec" => {
            let system = lines.system()?;
            let req_text: String = lines
                .all
                .iter()
                .filter(|l| {
                    l.starts_with("eps=") || l.starts_with("p=") || l.starts_with("window ")
                })
                .map(|l| format!("{l}\n"))
                .collect();
            let request = SpecRequest::parse(&system, &req_text)?;
            let horizon = lines
                .required("horizon")?
                .parse()
                .map_err(|_| Error::Parse("bad horizon".into()))?;
            let z = io::parse_point(
                &system,
                lines
                    .tagged("z")
                    .first()
                    .ok_or_else(|| Error::Parse("spec certificate missing z".into()))?,
            )?;
            Ok(Certificate::Spec { system, request, horizon, z })
        }
        "embedding" => {
            let system = lines.system()?;
            let get_words = |key: &str| -> Result<Vec<Word>> {
                lines.indexed(key).into_iter().map(|(_, w)| Word::parse(w)).collect()
            };
            Ok(Certificate::Embedding {
                system,
                m: lines.required("m")?.parse().map_err(|_| Error::Parse("bad m".into()))?,
                r: lines.required("r")?.parse().map_err(|_| Error::Parse("bad r".into()))?,
                eps: Dyadic::parse(lines.required("eps")?)?,
                common: lines
                    .required("common")?
                    .parse()
                    .map_err(|_| Error::Parse("bad common".into()))?,
                anchors: get_words("anchor")?,
                probes: get_words("probe")?,
                targets: get_words("target")?,
            })
        }
        "distance" => {
            let alphabet: usize = lines
                .required("alphabet")?
                .parse()
                .map_err(|_| Error::Parse("bad alphabet".into()))?;
            let mu_line = lines
                .tagged("mu")
                .first()
                .copied()
                .ok_or_else(|| Error::Parse("distance certificate missing mu".into()))?
                .to_string();
            let nu_line = lines
                .tagged("nu")
                .first()
                .copied()
                .ok_or_else(|| Error::Parse("distance certificate missing nu".into()))?
                .to_string();
            Ok(Certificate::Distance {
                alphabet,
                mu: MeasureRepr::parse(alphabet, &mu_line)?,
                nu: MeasureRepr::parse(alphabet, &nu_line)?,
                lo: parse_rat(lines.required("lo")?)?,
                hi: parse_rat(lines.required("hi")?)?,
                terms: lines
                    .required("terms")?
                    .parse()
                    .map_err(|_| Error::Parse("bad terms".into()))?,
            })
        }
        other => Err(Error::Parse(format!("unknown certificate kind {other:?}"))),
    }
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

/// Re-derives every inequality asserted by the certificate from its data.
pub fn replay(cert: &Certificate) -> Result<ReplayReport> {
    match cert {
        Certificate::Trace { system, orbit, eps, z } => replay_trace(system, orbit, eps, z),
        Certificate::Chain { system, eps, words } => replay_chain(system, eps, words),
        Certificate::Spec { system, request, horizon, z } => {
            let v = verify_spec_certificate(system, z, request, *horizon)?;
            Ok(ReplayReport {
                ok: v.ok,
                detail: match v.failure {
                    None => format!(
                        "all window and period inequalities hold at eps={} up to horizon {horizon}",
                        request.eps
                    ),
                    Some((family, n, j)) => format!("{family} inequality fails at n={n}, j={j}"),
                },
            })
        }
        Certificate::Embedding { system, m, r, eps, common, anchors, probes, targets } => {
            replay_embedding(system, *m, *r, eps, *common, anchors, probes, targets)
        }
        Certificate::Distance { mu, nu, lo, hi, terms, .. } => {
            replay_distance(mu, nu, lo, hi, *terms)
        }
    }
}

fn replay_trace(system: &System, orbit: &PseudoOrbit, eps: &Dyadic, z: &Point) -> Result<ReplayReport> {
    if orbit.points.is_empty() {
        return Ok(ReplayReport { ok: false, detail: "empty pseudo-orbit".into() });
    }
    for (i, p) in orbit.points.iter().enumerate() {
        if !system.validate_point(p) {
            return Ok(ReplayReport { ok: false, detail: format!("element {i} is invalid") });
        }
    }
    if !system.validate_point(z) {
        return Ok(ReplayReport { ok: false, detail: "tracing point is invalid".into() });
    }
    let n = orbit.points.len();
    for i in 0..n {
        let next = if i + 1 < n {
            Some(&orbit.points[i + 1])
        } else {
            orbit.tail_start.map(|s| &orbit.points[s])
        };
        if let Some(next) = next {
            let image = system.apply_map(&orbit.points[i])?;
            if !system.distance_below(&image, next, &orbit.delta)? {
                return Ok(ReplayReport {
                    ok: false,
                    detail: format!("delta condition fails at step {i}"),
                });
            }
        }
    }
    let horizon = match orbit.tail_start {
        None => n,
        Some(s) => (s + 4 * (n - s)).min(1 << 14).max(n),
    };
    let mut cur = z.clone();
    for i in 0..horizon {
        let x = element(orbit, i).expect("horizon in range");
        if !system.distance_below(&cur, x, eps)? {
            return Ok(ReplayReport {
                ok: false,
                detail: format!("tracing inequality fails at time {i}"),
            });
        }
        if i + 1 < horizon {
            cur = system.apply_map(&cur)?;
        }
    }
    Ok(ReplayReport {
        ok: true,
        detail: format!("{horizon} tracing inequalities verified at eps={eps}"),
    })
}

fn element<'a>(orbit: &'a PseudoOrbit, i: usize) -> Option<&'a Point> {
    orbit.element(i)
}

fn replay_chain(system: &System, eps: &Dyadic, words: &[Word]) -> Result<ReplayReport> {
    let System::Sft(sft) = system else {
        return Err(Error::TypeMismatch("chain certificates are for SFTs".into()));
    };
    if words.is_empty() {
        return Ok(ReplayReport { ok: false, detail: "empty chain".into() });
    }
    let mut points = Vec::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        match sft.freeze(w) {
            Ok(p) => points.push(p),
            Err(_) => {
                return Ok(ReplayReport { ok: false, detail: format!("word {i} is illegal") })
            }
        }
    }
    for i in 0..points.len() - 1 {
        let d = sft.distance(&points[i].shifted(), &points[i + 1]);
        if &d >= eps {
            return Ok(ReplayReport {
                ok: false,
                detail: format!("jump {i} has distance {d} >= {eps}"),
            });
        }
    }
    Ok(ReplayReport {
        ok: true,
        detail: format!("{} chain jumps verified at eps={eps}", points.len() - 1),
    })
}

#[allow(clippy::too_many_arguments)]
fn replay_embedding(
    system: &System,
    m: usize,
    r: usize,
    eps: &Dyadic,
    common: usize,
    anchors: &[Word],
    probes: &[Word],
    targets: &[Word],
) -> Result<ReplayReport> {
    let System::Sft(sft) = system else {
        return Err(Error::TypeMismatch("embedding certificates are for SFTs".into()));
    };
    let fail = |detail: String| Ok(ReplayReport { ok: false, detail });
    if anchors.is_empty() || anchors.len() != probes.len() || anchors.len() != targets.len() {
        return fail("mismatched anchor/probe/target counts".into());
    }
    let e = probes[0].len();
    for (i, a) in anchors.iter().enumerate() {
        if a.len() != m || !sft.word_legal(a) {
            return fail(format!("anchor {i} is not a legal length-m word"));
        }
        for b in anchors {
            if !sft.is_allowed(a[m - 1], b[0]) {
                return fail(format!("anchor {i} junction is illegal"));
            }
        }
        if a.symbols()[..common] != anchors[0].symbols()[..common] {
            return fail(format!("anchor {i} breaks the common prefix"));
        }
        if a.symbols()[r..r + e] != probes[i].symbols()[..] {
            return fail(format!("anchor {i} misses its probe at offset {r}"));
        }
        let t = &targets[i];
        if probes[i].len() < t.len() || probes[i].symbols()[..t.len()] != t.symbols()[..] {
            return fail(format!("probe {i} does not refine target {i}"));
        }
    }
    for i in 0..probes.len() {
        for j in i + 1..probes.len() {
            let Some(k) = probes[i]
                .symbols()
                .iter()
                .zip(probes[j].symbols())
                .position(|(x, y)| x != y)
            else {
                return fail(format!("probes {i} and {j} coincide"));
            };
            if &Dyadic::pow2(-(k as i64)) <= eps {
                return fail(format!("probes {i}/{j} separation fails at eps={eps}"));
            }
        }
    }
    Ok(ReplayReport {
        ok: true,
        detail: format!("embedding invariants verified for {} letters", anchors.len()),
    })
}

fn replay_distance(
    mu: &MeasureRepr,
    nu: &MeasureRepr,
    lo: &BigRational,
    hi: &BigRational,
    terms: usize,
) -> Result<ReplayReport> {
    let mut sum = BigRational::zero();
    for i in 1..=terms {
        let w = crate::measures::enumerated_word(mu.alphabet(), i);
        let diff = (cylinder_mass(mu, &w)? - cylinder_mass(nu, &w)?).abs();
        let weight = BigRational::new(1.into(), num_bigint::BigInt::from(1) << (i + 1));
        sum += diff * weight;
    }
    let tail = BigRational::new(1.into(), num_bigint::BigInt::from(1) << (terms + 1));
    let expected_hi = &sum + &tail;
    if &sum != lo {
        return Ok(ReplayReport {
            ok: false,
            detail: format!("recomputed lo = {} differs from claimed {}", rat_str(&sum), rat_str(lo)),
        });
    }
    if &expected_hi != hi {
        return Ok(ReplayReport {
            ok: false,
            detail: format!(
                "recomputed hi = {} differs from claimed {}",
                rat_str(&expected_hi),
                rat_str(hi)
            ),
        });
    }
    Ok(ReplayReport { ok: true, detail: format!("{terms} series terms recomputed exactly") })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{Sft, UpPoint};

    fn up(pre: &str, per: &str) -> UpPoint {
        UpPoint::new(Word::parse(pre).unwrap(), Word::parse(per).unwrap()).unwrap()
    }

    #[test]
    fn trace_round_trip_and_replay() {
        let system = System::Sft(Sft::full_shift(2));
        let x = up("", "01");
        let orbit = PseudoOrbit::periodic(
            vec![Point::Sft(x.clone()), Point::Sft(x.shifted())],
            Dyadic::pow2(-3),
        );
        let cert = Certificate::Trace {
            system,
            orbit,
            eps: Dyadic::pow2(-2),
            z: Point::Sft(x),
        };
        let text = cert.render();
        let parsed = parse(&text).unwrap();
        let rep = replay(&parsed).unwrap();
        assert!(rep.ok, "{}", rep.detail);
    }

    #[test]
    fn tampered_trace_fails() {
        let system = System::Sft(Sft::full_shift(2));
        let x = up("", "01");
        let orbit = PseudoOrbit::periodic(
            vec![Point::Sft(x.clone()), Point::Sft(x.shifted())],
            Dyadic::pow2(-3),
        );
        let cert = Certificate::Trace {
            system,
            orbit,
            eps: Dyadic::pow2(-2),
            z: Point::Sft(up("", "10")), // wrong phase
        };
        let rep = replay(&parse(&cert.render()).unwrap()).unwrap();
        assert!(!rep.ok);
    }

    #[test]
    fn distance_replay_is_exact() {
        let mu = crate::measures::periodic_orbit_measure(2, &up("", "0")).unwrap();
        let nu = crate::measures::periodic_orbit_measure(2, &up("", "01")).unwrap();
        let tol = BigRational::new(1.into(), 256.into());
        let d = crate::measures::weak_star_distance(&mu, &nu, &tol).unwrap();
        let cert = Certificate::Distance {
            alphabet: 2,
            mu,
            nu,
            lo: d.lo.clone(),
            hi: d.hi.clone(),
            terms: d.terms,
        };
        let rep = replay(&parse(&cert.render()).unwrap()).unwrap();
        assert!(rep.ok, "{}", rep.detail);
        // perturb the claim
        let bad = Certificate::Distance {
            alphabet: 2,
            mu: crate::measures::periodic_orbit_measure(2, &up("", "0")).unwrap(),
            nu: crate::measures::periodic_orbit_measure(2, &up("", "01")).unwrap(),
            lo: &d.lo + &tol,
            hi: d.hi,
            terms: d.terms,
        };
        assert!(!replay(&bad).unwrap().ok);
    }
}
