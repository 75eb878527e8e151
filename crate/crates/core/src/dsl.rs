//! Text forms of sequences, series, coefficients and index sets, as accepted
//! on the command line.
//!
//! A spec is `name` or `name:body`. Bodies are `key=value` lists split at
//! top-level commas; a value holding its own commas (a nested spec such as
//! `seq=[geometric:c=1,q=1/2]`) goes in brackets.

use std::collections::BTreeMap;
use std::path::Path;

use crate::density::IndexSet;
use crate::error::{Error, Result};
use crate::numeric::{parse_rational, Num};
use crate::point::NormKind;
use crate::sequence::{parse_coords, SequenceSpec};
use crate::series::{CoefficientSpec, SeriesSpec};

fn split_head(s: &str) -> (&str, Option<&str>) {
    match s.split_once(':') {
        Some((h, b)) => (h.trim(), Some(b.trim())),
        None => (s.trim(), None),
    }
}

fn strip_brackets(v: &str) -> &str {
    let t = v.trim();
    t.strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .filter(|inner| balanced(inner))
        .unwrap_or(t)
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return false;
        }
    }
    depth == 0
}

/// Splits `k1=v1,k2=v2` at commas outside brackets that start a new `key=`.
pub fn split_params(body: &str) -> Result<BTreeMap<String, String>> {
    let mut parts: Vec<String> = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    let chars: Vec<char> = body.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            _ => {}
        }
        if c == ',' && depth == 0 && starts_key(&chars[i + 1..]) {
            parts.push(std::mem::take(&mut current));
            continue;
        }
        current.push(c);
    }
    if depth != 0 {
        return Err(Error::invalid(format!("unbalanced brackets in '{body}'")));
    }
    parts.push(current);
    let mut map = BTreeMap::new();
    for part in parts.iter().filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("expected key=value, found '{part}'")))?;
        let key = k.trim().to_string();
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::invalid(format!("parameter '{key}' given twice")));
        }
    }
    Ok(map)
}

fn starts_key(rest: &[char]) -> bool {
    let mut seen = false;
    for &c in rest {
        if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
            seen = true;
        } else {
            return seen && c == '=';
        }
    }
    false
}

struct Params {
    name: String,
    map: BTreeMap<String, String>,
}

impl Params {
    fn parse(name: &str, body: Option<&str>, allowed: &[&str]) -> Result<Self> {
        let map = match body {
            Some(b) => split_params(b)?,
            None => BTreeMap::new(),
        };
        if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::invalid(format!("unknown parameter '{k}' for '{name}'")));
        }
        Ok(Params {
            name: name.to_string(),
            map,
        })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::invalid(format!("'{}' requires parameter '{key}'", self.name)))
    }
}

fn no_body(name: &str, body: Option<&str>) -> Result<()> {
    match body {
        Some(b) if !b.is_empty() => Err(Error::invalid(format!("'{name}' takes no parameters"))),
        _ => Ok(()),
    }
}

/// `cube-spike`, `power-square-spike:p=<q>`, `alt-neg`, `cube-spike-squared`,
/// `constant:value=<v>`, `geometric:c=<v>,q=<q>`, `file:<path>`, plus
/// `harmonic:dir=<v>`, `altharmonic:dir=<v>`, `noise:seed=,lo=,hi=,dim=`,
/// `indicator:<set>`, `partial-sums:<seq>` and `abs:<seq>`.
pub fn parse_sequence(s: &str) -> Result<SequenceSpec> {
    let (name, body) = split_head(s);
    match name {
        "file" => {
            let path = body.filter(|b| !b.is_empty()).ok_or_else(|| Error::invalid("file needs a path"))?;
            SequenceSpec::from_file(Path::new(path.strip_prefix("path=").unwrap_or(path)), None)
        }
        "partial-sums" => Ok(parse_sequence(required_body(name, body)?)?.partial_sums()),
        "abs" => Ok(parse_sequence(required_body(name, body)?)?.abs()),
        "indicator" => Ok(SequenceSpec::scalar_constant(Num::int(1)).masked(parse_set(required_body(name, body)?)?)),
        "harmonic" | "altharmonic" => {
            let ps = Params::parse(name, body, &["dir"])?;
            let dir = ps.get("dir").map_or(Ok(vec![Num::int(1)]), parse_coords)?;
            if name == "harmonic" {
                SequenceSpec::harmonic(dir)
            } else {
                SequenceSpec::alt_harmonic(dir)
            }
        }
        "noise" => {
            let ps = Params::parse(name, body, &["seed", "lo", "hi", "dim"])?;
            let seed = parse_seed(ps.required("seed")?)?;
            let lo = ps.get("lo").unwrap_or("0").parse()?;
            let hi = ps.get("hi").unwrap_or("1").parse()?;
            let dim = ps
                .get("dim")
                .unwrap_or("1")
                .parse::<usize>()
                .map_err(|_| Error::invalid("dim must be a positive integer"))?;
            SequenceSpec::noise(seed, lo, hi, dim)
        }
        _ => {
            let map = match body {
                Some(b) => split_params(b)?,
                None => BTreeMap::new(),
            };
            SequenceSpec::builtin(name, &map)
        }
    }
}

fn required_body<'a>(name: &str, body: Option<&'a str>) -> Result<&'a str> {
    body.map(strip_brackets)
        .filter(|b| !b.is_empty())
        .ok_or_else(|| Error::invalid(format!("'{name}' needs an inner spec")))
}

/// `geom:base=<q>,dir=<v>`, `harmonic:dir=<v>`, `altharmonic:dir=<v>`,
/// `file:<path>`, `seq:<sequence>`; terms joined with `+` add.
pub fn parse_series(s: &str, norm: NormKind) -> Result<SeriesSpec> {
    let mut parts = split_top_level_plus(s).into_iter();
    let first = parse_series_term(parts.next().expect("split yields one part"))?;
    let terms = parts.try_fold(first, |acc, part| acc.plus(&parse_series_term(part)?))?;
    Ok(SeriesSpec::new(terms, norm))
}

fn parse_series_term(s: &str) -> Result<SequenceSpec> {
    let (name, body) = split_head(s);
    match name {
        "geom" => {
            let ps = Params::parse(name, body, &["base", "dir"])?;
            let base: Num = ps.required("base")?.parse()?;
            let dir = ps.get("dir").map_or(Ok(vec![Num::int(1)]), parse_coords)?;
            SequenceSpec::geometric(dir, base)
        }
        "harmonic" | "altharmonic" | "file" => parse_sequence(s),
        "seq" => parse_sequence(required_body(name, body)?),
        other => Err(Error::invalid(format!("unknown series '{other}'"))),
    }
}

/// Splits at `+` outside brackets when a name follows.
fn split_top_level_plus(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = s.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'[' | b'(' => depth += 1,
            b']' | b')' => depth -= 1,
            b'+' if depth == 0 && bytes.get(i + 1).is_some_and(u8::is_ascii_alphabetic) => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

/// `const:<v>`, `zero`, `altsign`, `reciprocal`, `geom:<q>`, `file:<path>`,
/// `constructed:<f>` and `random:seed=<s>,bound=<b>`.
pub fn parse_coeffs(s: &str) -> Result<CoefficientSpec> {
    let (name, body) = split_head(s);
    match name {
        "const" => Ok(CoefficientSpec::constant(required_body(name, body)?.parse()?)),
        "zero" => {
            no_body(name, body)?;
            Ok(CoefficientSpec::zero())
        }
        "altsign" => {
            no_body(name, body)?;
            Ok(CoefficientSpec::alternating())
        }
        "reciprocal" => {
            no_body(name, body)?;
            Ok(CoefficientSpec::reciprocal())
        }
        "geom" => CoefficientSpec::geometric(required_body(name, body)?.parse()?),
        "file" => CoefficientSpec::table(parse_sequence(s)?),
        "constructed" => CoefficientSpec::constructed(&parse_scalar_input(required_body(name, body)?)?),
        "random" => {
            let ps = Params::parse(name, body, &["seed", "bound"])?;
            let seed = parse_seed(ps.required("seed")?)?;
            let bound = ps.get("bound").unwrap_or("1").parse()?;
            CoefficientSpec::random(seed, bound)
        }
        other => Err(Error::invalid(format!("unknown coefficient rule '{other}'"))),
    }
}

/// A scalar sequence given either as a coefficient rule (`reciprocal`,
/// `const:1`, ...) or as a sequence spec.
pub fn parse_scalar_input(s: &str) -> Result<SequenceSpec> {
    let spec = match parse_coeffs(s) {
        Ok(c) => c.rule().clone(),
        Err(_) => parse_sequence(s)?,
    };
    if spec.dim() != 1 {
        return Err(Error::Dimension {
            expected: 1,
            got: spec.dim(),
        });
    }
    Ok(spec)
}

/// `cubes`, `squares`, `ap:a=<int>,step=<int>`, `evens`, `odds`, `all`,
/// `list:<i>,<j>,...`, `complement:<set>` and
/// `exceed:seq=<seq>,L=<point>,eps=<q>[,norm=max|euclidean]`.
pub fn parse_set(s: &str) -> Result<IndexSet> {
    let (name, body) = split_head(s);
    let plain = |set: IndexSet| no_body(name, body).map(|_| set);
    match name {
        "cubes" => plain(IndexSet::Cubes),
        "squares" => plain(IndexSet::Squares),
        "evens" => plain(IndexSet::Evens),
        "odds" => plain(IndexSet::Odds),
        "all" => plain(IndexSet::All),
        "ap" => {
            let ps = Params::parse(name, body, &["a", "step"])?;
            IndexSet::progression(parse_index(ps.required("a")?)?, parse_index(ps.required("step")?)?)
        }
        "list" => {
            let body = strip_brackets(body.unwrap_or(""));
            let items = body
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(parse_index)
                .collect::<Result<Vec<u64>>>()?;
            IndexSet::explicit(items)
        }
        "complement" => Ok(parse_set(required_body(name, body)?)?.complement()),
        "exceed" => {
            let ps = Params::parse(name, body, &["seq", "L", "eps", "norm"])?;
            let seq = parse_sequence(strip_brackets(ps.required("seq")?))?;
            let center = parse_coords(ps.required("L")?)?;
            let eps = ps.required("eps")?.parse()?;
            let norm = ps.get("norm").map_or(Ok(NormKind::Max), str::parse)?;
            IndexSet::exceed(seq, center, eps, norm)
        }
        other => Err(Error::invalid(format!("unknown index set '{other}'"))),
    }
}

fn parse_index(s: &str) -> Result<u64> {
    s.trim()
        .parse::<u64>()
        .map_err(|_| Error::invalid(format!("'{}' is not a nonnegative integer", s.trim())))
}

/// Hex with or without `0x`.
pub fn parse_seed(s: &str) -> Result<u64> {
    let t = s.trim();
    let digits = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
    u64::from_str_radix(digits, 16).map_err(|_| Error::invalid(format!("'{t}' is not a hex seed")))
}

/// Comma-separated decreasing radii, e.g. `1,1/2,1/4`.
pub fn parse_eps_list(s: &str) -> Result<Vec<Num>> {
    s.split(',').map(|t| Ok(Num::new(parse_rational(t)?))).collect()
}
