//! Text formats for system definitions and points.
//!
//! System files hold one directive per line:
//! `sft d=<int>` followed by `forbid <ab>` lines, or `odometer s=<i,j,...>`,
//! or `product <file> <file> ...`. Points are serialized as
//! `pre=<digits> per=<digits>` (odometer points as `coords=...`, product
//! points as `|`-separated factor points).

use crate::error::{Error, Result};
use crate::systems::{Odometer, OdometerPoint, Point, Product, ProductPoint, Sft, System, UpPoint, Word};

/// Parses a system definition. `resolve` loads the contents of files named by
/// `product` directives.
pub fn parse_system(text: &str, resolve: &dyn Fn(&str) -> Result<String>) -> Result<System> {
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let first = lines
        .first()
        .ok_or_else(|| Error::Parse("empty system definition".into()))?;
    if let Some(rest) = first.strip_prefix("sft ") {
        let d: usize = rest
            .trim()
            .strip_prefix("d=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad sft directive {first:?}")))?;
        let mut forbidden = Vec::new();
        for line in &lines[1..] {
            let pair = line
                .strip_prefix("forbid ")
                .ok_or_else(|| Error::Parse(format!("unexpected directive {line:?}")))?;
            let w = Word::parse(pair.trim())?;
            if w.len() != 2 {
                return Err(Error::Parse(format!("forbid expects a two-symbol word, got {pair:?}")));
            }
            forbidden.push((w[0].index(), w[1].index()));
        }
        Ok(System::Sft(Sft::from_forbidden(d + 1, &forbidden)?))
    } else if let Some(rest) = first.strip_prefix("odometer ") {
        let spec = rest
            .trim()
            .strip_prefix("s=")
            .ok_or_else(|| Error::Parse(format!("bad odometer directive {first:?}")))?;
        let scale: Vec<u64> = spec
            .split(',')
            .map(|v| v.trim().parse().map_err(|_| Error::Parse(format!("bad scale entry {v:?}"))))
            .collect::<Result<_>>()?;
        if lines.len() > 1 {
            return Err(Error::Parse("odometer definition takes a single line".into()));
        }
        Ok(System::Odometer(Odometer::new(scale)?))
    } else if *first == "product inline" {
        // `begin`/`end` blocks holding one factor definition each
        let mut factors = Vec::new();
        let mut block: Option<String> = None;
        for line in &lines[1..] {
            match (*line, &mut block) {
                ("begin", None) => block = Some(String::new()),
                ("end", Some(text)) => {
                    match parse_system(text, resolve)? {
                        System::Sft(s) => factors.push(s),
                        _ => return Err(Error::Parse("product factors must be SFTs".into())),
                    }
                    block = None;
                }
                (l, Some(text)) => {
                    text.push_str(l);
                    text.push('\n');
                }
                (l, None) => return Err(Error::Parse(format!("unexpected line {l:?} in product"))),
            }
        }
        if block.is_some() {
            return Err(Error::Parse("unterminated factor block".into()));
        }
        Ok(System::Product(Product::new(factors)?))
    } else if let Some(rest) = first.strip_prefix("product") {
        let mut factors = Vec::new();
        for name in rest.split_whitespace() {
            let sub = parse_system(&resolve(name)?, resolve)?;
            match sub {
                System::Sft(s) => factors.push(s),
                _ => return Err(Error::Parse("product factors must be SFTs".into())),
            }
        }
        if lines.len() > 1 {
            return Err(Error::Parse("product definition takes a single line".into()));
        }
        Ok(System::Product(Product::new(factors)?))
    } else {
        Err(Error::Parse(format!("unknown system directive {first:?}")))
    }
}

pub fn render_system(system: &System) -> String {
    match system {
        System::Sft(s) => {
            let d = s.alphabet_size() - 1;
            let mut out = format!("sft d={d}\n");
            for a in 0..s.alphabet_size() {
                for b in 0..s.alphabet_size() {
                    if !s.is_allowed_idx(a, b) {
                        out.push_str(&format!("forbid {a}{b}\n"));
                    }
                }
            }
            out
        }
        System::Odometer(o) => {
            let parts: Vec<String> = o.scale().iter().map(u64::to_string).collect();
            format!("odometer s={}\n", parts.join(","))
        }
        System::Product(p) => {
            let mut out = String::from("product inline\n");
            for f in p.factors() {
                out.push_str("begin\n");
                out.push_str(&render_system(&System::Sft(f.clone())));
                out.push_str("end\n");
            }
            out
        }
    }
}

pub fn parse_up_point(s: &str) -> Result<UpPoint> {
    let s = s.trim();
    let rest = s
        .strip_prefix("pre=")
        .ok_or_else(|| Error::Parse(format!("point must start with pre=, got {s:?}")))?;
    let (pre_s, per_s) = rest
        .split_once("per=")
        .ok_or_else(|| Error::Parse(format!("point missing per= in {s:?}")))?;
    let pre = Word::parse(pre_s.trim())?;
    let per = Word::parse(per_s.trim())?;
    UpPoint::new(pre, per)
}

pub fn parse_point(system: &System, s: &str) -> Result<Point> {
    match system {
        System::Sft(_) => Ok(Point::Sft(parse_up_point(s)?)),
        System::Odometer(_) => {
            let spec = s
                .trim()
                .strip_prefix("coords=")
                .ok_or_else(|| Error::Parse(format!("odometer point must start with coords=, got {s:?}")))?;
            let coords: Vec<u64> = spec
                .split(',')
                .map(|v| v.trim().parse().map_err(|_| Error::Parse(format!("bad coordinate {v:?}"))))
                .collect::<Result<_>>()?;
            Ok(Point::Odometer(OdometerPoint { coords }))
        }
        System::Product(_) => {
            let components = s
                .split('|')
                .map(parse_up_point)
                .collect::<Result<Vec<_>>>()?;
            Ok(Point::Product(ProductPoint { components }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_includes(_: &str) -> Result<String> {
        Err(Error::Parse("no includes available".into()))
    }

    #[test]
    fn round_trip_sft() {
        let text = "sft d=1\nforbid 11\n";
        let sys = parse_system(text, &no_includes).unwrap();
        assert_eq!(render_system(&sys), text);
        match sys {
            System::Sft(s) => assert_eq!(s, Sft::golden_mean()),
            _ => panic!("expected an SFT"),
        }
    }

    #[test]
    fn parse_odometer_and_point() {
        let sys = parse_system("odometer s=2,4,8", &no_includes).unwrap();
        let p = parse_point(&sys, "coords=1,3,7").unwrap();
        assert!(sys.validate_point(&p));
    }

    #[test]
    fn parse_product_via_includes() {
        let loader = |name: &str| -> Result<String> {
            match name {
                "full.sft" => Ok("sft d=1".into()),
                _ => Err(Error::Parse(format!("unknown file {name}"))),
            }
        };
        let sys = parse_system("product full.sft full.sft", &loader).unwrap();
        let p = parse_point(&sys, "pre= per=0 | pre=1 per=0").unwrap();
        assert!(sys.validate_point(&p));
    }

    #[test]
    fn inline_product_round_trip() {
        let loader = |name: &str| -> Result<String> {
            match name {
                "gm.sft" => Ok("sft d=1\nforbid 11".into()),
                _ => Err(Error::Parse(format!("unknown file {name}"))),
            }
        };
        let sys = parse_system("product gm.sft gm.sft", &loader).unwrap();
        let text = render_system(&sys);
        let reparsed = parse_system(&text, &no_includes).unwrap();
        assert_eq!(sys, reparsed);
    }

    #[test]
    fn point_text_round_trip() {
        let p = parse_up_point("pre=01 per=10").unwrap();
        assert_eq!(parse_up_point(&p.to_string()).unwrap(), p);
    }
}
