//! Potential specifications shared by every subcommand.
//!
//! A spec is either a text file with one coefficient per line,
//!
//! ```text
//! # P(x) = 0.1 e^{2ix},  Q(x) = 0.1 e^{-2ix}
//! P  2  0.1  0.0
//! Q -2  0.1  0.0
//! ```
//!
//! or a preset: `preset:zero`, `preset:example-c15 a b A B` (each value real or
//! `re,im`), or `preset:xt t [amp ratio modes]`.

use std::fmt::Write as _;
use std::path::Path;

use dirac_core::{FourierPotential, C64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("{origin}:{line}: {msg}")]
    Line { origin: String, line: usize, msg: String },
    #[error("{0}")]
    Preset(String),
    #[error("cannot read potential file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Core(#[from] dirac_core::Error),
}

const XT_DEFAULTS: [f64; 3] = [0.08, 0.6, 12.0];

/// Parses `re` or `re,im`.
pub fn parse_complex(token: &str) -> Option<C64> {
    match token.split_once(',') {
        Some((re, im)) => Some(C64::new(re.trim().parse().ok()?, im.trim().parse().ok()?)),
        None => Some(C64::new(token.trim().parse().ok()?, 0.0)),
    }
}

fn parse_real(token: &str, what: &str) -> Result<f64, SpecError> {
    token.parse().map_err(|_| SpecError::Preset(format!("{what}: expected a number, got {token:?}")))
}

/// Resolves the tokens of a spec; paths are taken relative to `base`.
pub fn resolve(tokens: &[String], base: &Path) -> Result<FourierPotential, SpecError> {
    let Some(head) = tokens.first() else {
        return Err(SpecError::Preset("missing potential specification".into()));
    };
    match head.strip_prefix("preset:") {
        Some(name) => preset(name, &tokens[1..]),
        None if tokens.len() == 1 => {
            let path = base.join(head);
            let text = std::fs::read_to_string(&path).map_err(|source| SpecError::Io { path: path.display().to_string(), source })?;
            parse_text(&text, &path.display().to_string())
        }
        None => Err(SpecError::Preset(format!("unexpected arguments after potential file {head:?}: {:?}", &tokens[1..]))),
    }
}

/// [`resolve`] on a whitespace-separated spec string.
pub fn resolve_str(spec: &str, base: &Path) -> Result<FourierPotential, SpecError> {
    let tokens: Vec<String> = spec.split_whitespace().map(String::from).collect();
    resolve(&tokens, base)
}

fn preset(name: &str, args: &[String]) -> Result<FourierPotential, SpecError> {
    match name {
        "zero" if args.is_empty() => Ok(FourierPotential::zero()),
        "zero" => Err(SpecError::Preset("preset:zero takes no arguments".into())),
        "example-c15" => {
            if args.len() != 4 {
                return Err(SpecError::Preset(format!("preset:example-c15 needs a b A B, got {} values", args.len())));
            }
            let mut c = [C64::new(0.0, 0.0); 4];
            for (slot, tok) in c.iter_mut().zip(args) {
                *slot = parse_complex(tok).ok_or_else(|| SpecError::Preset(format!("example-c15: bad value {tok:?}")))?;
            }
            Ok(FourierPotential::two_mode(c[0], c[1], c[2], c[3]))
        }
        "xt" => {
            if args.len() != 1 && args.len() != 4 {
                return Err(SpecError::Preset("preset:xt needs t, optionally followed by amp ratio modes".into()));
            }
            let t = parse_real(&args[0], "xt t")?;
            let mut rest = XT_DEFAULTS;
            for (slot, tok) in rest.iter_mut().zip(&args[1..]) {
                *slot = parse_real(tok, "xt")?;
            }
            if rest[2].fract() != 0.0 || rest[2] < 1.0 {
                return Err(SpecError::Preset("xt modes must be a positive integer".into()));
            }
            Ok(FourierPotential::decaying_xt(t, rest[0], rest[1], rest[2] as i64)?)
        }
        _ => Err(SpecError::Preset(format!("unknown preset {name:?} (known: zero, example-c15, xt)"))),
    }
}

/// Parses the `P k re im` / `Q k re im` line format; `im` may be omitted.
pub fn parse_text(text: &str, origin: &str) -> Result<FourierPotential, SpecError> {
    let mut p = Vec::new();
    let mut q = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let err = |msg: String| SpecError::Line { origin: origin.to_string(), line: i + 1, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(err(format!("expected `P|Q k re [im]`, got {line:?}")));
        }
        let k: i64 = fields[1].parse().map_err(|_| err(format!("bad mode index {:?}", fields[1])))?;
        if k.rem_euclid(2) != 0 {
            return Err(err(format!("mode index {k} is odd")));
        }
        let re: f64 = fields[2].parse().map_err(|_| err(format!("bad real part {:?}", fields[2])))?;
        let im: f64 = match fields.get(3) {
            Some(t) => t.parse().map_err(|_| err(format!("bad imaginary part {t:?}")))?,
            None => 0.0,
        };
        if !(re.is_finite() && im.is_finite()) {
            return Err(err("coefficient is not finite".into()));
        }
        match fields[0] {
            "P" | "p" => p.push((k, C64::new(re, im))),
            "Q" | "q" => q.push((k, C64::new(re, im))),
            other => return Err(err(format!("unknown component {other:?}, expected P or Q"))),
        }
    }
    Ok(FourierPotential::from_coeffs(&p, &q)?)
}

/// Writes `v` back in the line format with full precision.
pub fn to_text(v: &FourierPotential) -> String {
    let mut out = String::new();
    for (tag, entries) in [("P", v.p_entries().collect::<Vec<_>>()), ("Q", v.q_entries().collect())] {
        for (k, c) in entries {
            let _ = writeln!(out, "{tag} {k} {:.16e} {:.16e}", c.re, c.im);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn file_format_round_trips() {
        let text = "# comment\nP 2 0.1 0.2\n\nQ -2 -0.3   # trailing\np 2 0.05 0\n";
        let v = parse_text(text, "inline").unwrap();
        assert_eq!(v.p(2), C64::new(0.15000000000000002, 0.2));
        assert_eq!(v.q(-2), C64::new(-0.3, 0.0));
        assert_eq!(parse_text(&to_text(&v), "again").unwrap(), v);
    }

    #[test]
    fn malformed_lines_report_their_position() {
        let e = parse_text("P 2 0.1 0\nP 3 0.1 0\n", "f.pot").unwrap_err();
        assert_eq!(e.to_string(), "f.pot:2: mode index 3 is odd");
        assert!(parse_text("R 2 0.1\n", "f").is_err());
        assert!(parse_text("P 2 nan\n", "f").is_err());
        assert!(parse_text("P 2\n", "f").is_err());
    }

    #[test]
    fn presets() {
        let base = Path::new(".");
        assert!(resolve(&toks("preset:zero"), base).unwrap().is_zero());
        let v = resolve(&toks("preset:example-c15 0.1 0.2,0.1 -0.3 0.4"), base).unwrap();
        assert_eq!(v.p(-2), C64::new(0.2, 0.1));
        assert_eq!(v.q(2), C64::new(-0.3, 0.0));
        assert_eq!(resolve(&toks("preset:xt 2"), base).unwrap(), FourierPotential::decaying_xt(2.0, 0.08, 0.6, 12).unwrap());
        assert!(resolve(&toks("preset:example-c15 0.1 0.1"), base).is_err());
        assert!(resolve(&toks("preset:nope"), base).is_err());
        assert!(resolve(&toks("missing-file.pot"), base).is_err());
    }
}
