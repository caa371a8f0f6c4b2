use num_complex::Complex64;

use super::{blaschke, edigarian_zwonek, polydisc_product, power, symmetrization, BlaschkeData, ProperMap};
use crate::error::{LabError, Result};

fn half(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `z⁴ ((z − 1/2)/(1 − z/2))²`, multiplicity 6.
pub fn b1() -> ProperMap {
    let mut m = blaschke(&[half(0.0), half(0.5)], &[4, 2], 0.0).expect("zeros inside D");
    m.name = "b1".into();
    m
}

/// `z (z + 1/2)/(1 + z/2) (z − 3/4)/(1 − 3z/4)`, multiplicity 3.
pub fn b2() -> ProperMap {
    let mut m = blaschke(&[half(-0.5), half(0.0), half(0.75)], &[1, 1, 1], 0.0)
        .expect("zeros inside D");
    m.name = "b2".into();
    m
}

/// Parses `"0.5"`, `"-0.25i"`, `"0.3+0.2i"`, `"i"`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || LabError::Parse(format!("invalid complex number {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(half).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, imag(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

pub(super) fn format_blaschke(b: &BlaschkeData) -> String {
    let zeros: Vec<String> = b.zeros.iter().map(|z| format_complex(*z)).collect();
    let powers: Vec<String> = b.powers.iter().map(|k| k.to_string()).collect();
    format!("{};{};{}", zeros.join(","), powers.join(","), b.phase)
}

fn parse_blaschke(text: &str) -> Result<ProperMap> {
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() < 2 || parts.len() > 3 {
        return Err(LabError::Parse(format!("expected <zeros;powers;phase>, got {text:?}")));
    }
    let zeros = parts[0].split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
    let powers = parts[1]
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| LabError::Parse(format!("bad power {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let phase = match parts.get(2) {
        Some(t) if !t.trim().is_empty() => {
            t.trim().parse::<f64>().map_err(|_| LabError::Parse(format!("bad phase {t:?}")))?
        }
        _ => 0.0,
    };
    blaschke(&zeros, &powers, phase)
}

fn parse_positive(t: &str, what: &str) -> Result<usize> {
    match t.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(LabError::Parse(format!("bad {what} {t:?}"))),
    }
}

/// Resolves a catalog name to a map.
pub fn parse_map(name: &str) -> Result<ProperMap> {
    let name = name.trim();
    match name {
        "b1" => return Ok(b1()),
        "b2" => return Ok(b2()),
        "id" | "identity" => return Ok(power(1)),
        "prod" => return polydisc_product(&[b2(), b2()]),
        _ => {}
    }
    let unknown = || LabError::UnknownMap(name.to_string());
    let (head, rest) = name.split_once(':').ok_or_else(unknown)?;
    let mut map = match head {
        "power" => power(parse_positive(rest, "power")? as u32),
        "blaschke" => parse_blaschke(rest)?,
        "sym" => symmetrization(parse_positive(rest, "dimension")?),
        "ez" => {
            let (base, d) = rest.rsplit_once(':').ok_or_else(unknown)?;
            let base = parse_map(base)?;
            edigarian_zwonek(&base, parse_positive(d, "dimension")?)?
        }
        "prod" => {
            let factors = rest.split('|').map(parse_map).collect::<Result<Vec<_>>>()?;
            polydisc_product(&factors)?
        }
        _ => return Err(unknown()),
    };
    if matches!(head, "ez" | "prod" | "blaschke") {
        map.name = name.to_string();
    }
    Ok(map)
}

/// Named maps exercised by the acceptance checks.
pub fn catalog_entries() -> Vec<&'static str> {
    vec![
        "b1", "b2", "power:1", "power:2", "power:3", "power:4", "power:5", "prod", "sym:2", "sym:3",
        "ez:b2:2",
    ]
}

/// One line per catalog map: name, multiplicity, source and target.
pub fn list_catalog() -> String {
    let mut out = String::new();
    for name in catalog_entries() {
        let m = parse_map(name).expect("catalog names parse");
        out.push_str(&format!(
            "{} multiplicity {} {} -> {}\n",
            name,
            m.multiplicity(),
            m.source().name(),
            m.target().name()
        ));
    }
    out.push_str(
        "patterns: blaschke:<zeros;powers;phase> power:<n> sym:<d> ez:<blaschke>:<d> prod:<a>|<b>|...\n",
    );
    out
}
