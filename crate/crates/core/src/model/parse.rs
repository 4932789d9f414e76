//! Text format for model files.
//!
//! A model file is a sequence of `key: value` lines; `#` starts a comment
//! and blank lines are skipped. Keys appear in this order when serialized:
//!
//! ```text
//! label: half-space-alternating
//! dimension: 2
//! nonneg_axes: 1
//! moduli: 2
//! residue_poly: 0 ; 1 1 ; 0
//! start: 0 0
//! steps 0: 0 1, 1 0, 0 -1, -1 0
//! steps 1: 0 1, 1 1, 1 0, 1 -1, 0 -1, -1 -1, -1 0, -1 1
//! ```
//!
//! `residue_poly` holds constant; position coefficients; time coefficient,
//! one line per modulus. `steps R` keys a class by its residue vector with
//! comma-separated entries (`steps 0,1: ...` for two moduli). Each step is
//! `dx dy ...` with an optional trailing rational weight, e.g. `1 0 2/3`.

use super::{Model, ModelError, ResiduePoly, Step};
use crate::ring::{rational_parse, rational_to_string};
use num_traits::One;
use std::collections::BTreeMap;

pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let mut label = None;
    let mut dimension = None;
    let mut nonneg_axes = None;
    let mut moduli: Option<Vec<i64>> = None;
    let mut polys: Vec<ResiduePoly> = Vec::new();
    let mut start = None;
    let mut step_sets: BTreeMap<Vec<i64>, Vec<Step>> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let fail = |msg: String| ModelError::Parse { line: lineno, msg };
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| fail("expected `key: value`".into()))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "label" => label = Some(value.to_string()),
            "dimension" => {
                dimension =
                    Some(value.parse::<usize>().map_err(|_| fail("bad dimension".into()))?)
            }
            "nonneg_axes" => {
                nonneg_axes =
                    Some(value.parse::<usize>().map_err(|_| fail("bad nonneg_axes".into()))?)
            }
            "moduli" => {
                moduli = Some(parse_ints(value).map_err(|m| fail(m))?);
            }
            "residue_poly" => {
                let parts: Vec<&str> = value.split(';').collect();
                if parts.len() != 3 {
                    return Err(fail(
                        "residue_poly needs `constant ; position coeffs ; time`".into(),
                    ));
                }
                let constant =
                    parts[0].trim().parse::<i64>().map_err(|_| fail("bad constant".into()))?;
                let position = parse_ints(parts[1]).map_err(|m| fail(m))?;
                let time =
                    parts[2].trim().parse::<i64>().map_err(|_| fail("bad time coeff".into()))?;
                polys.push(ResiduePoly { constant, position, time });
            }
            "start" => {
                start = Some(parse_ints(value).map_err(|m| fail(m))?);
            }
            _ if key.starts_with("steps") => {
                let rv = key["steps".len()..].trim();
                let residues: Vec<i64> = rv
                    .split(',')
                    .map(|t| t.trim().parse::<i64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| fail(format!("bad residue key `{}`", rv)))?;
                let dim = dimension
                    .ok_or_else(|| fail("dimension must appear before step lines".into()))?;
                let mut steps = Vec::new();
                for tok in value.split(',') {
                    let tok = tok.trim();
                    if tok.is_empty() {
                        continue;
                    }
                    steps.push(parse_step(tok, dim).map_err(|m| fail(m))?);
                }
                if step_sets.insert(residues.clone(), steps).is_some() {
                    return Err(fail(format!("duplicate step line for class {:?}", residues)));
                }
            }
            _ => return Err(fail(format!("unknown key `{}`", key))),
        }
    }

    let semantic = |msg: &str| ModelError::Semantic(msg.into());
    let model = Model {
        label: label.unwrap_or_default(),
        dimension: dimension.ok_or_else(|| semantic("missing dimension"))?,
        nonneg_axes: nonneg_axes.ok_or_else(|| semantic("missing nonneg_axes"))?,
        moduli: moduli.ok_or_else(|| semantic("missing moduli"))?,
        residue_polys: polys,
        start: start.ok_or_else(|| semantic("missing start"))?,
        step_sets,
    };
    model.validate()
}

fn parse_ints(s: &str) -> Result<Vec<i64>, String> {
    s.split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| format!("bad integer `{}`", t)))
        .collect()
}

fn parse_step(tok: &str, dim: usize) -> Result<Step, String> {
    let fields: Vec<&str> = tok.split_whitespace().collect();
    if fields.len() != dim && fields.len() != dim + 1 {
        return Err(format!("step `{}` needs {} coordinates and an optional weight", tok, dim));
    }
    let disp: Vec<i64> = fields[..dim]
        .iter()
        .map(|t| t.parse::<i64>().map_err(|_| format!("bad displacement `{}`", t)))
        .collect::<Result<_, _>>()?;
    let weight = if fields.len() == dim + 1 {
        rational_parse(fields[dim]).ok_or_else(|| format!("bad weight `{}`", fields[dim]))?
    } else {
        One::one()
    };
    Ok(Step { disp, weight })
}

/// Canonical rendering: fixed key order, classes in lexicographic order,
/// steps in compass-then-lex order (validation already sorted them).
pub fn serialize_model(m: &Model) -> String {
    let mut out = String::new();
    out.push_str(&format!("label: {}\n", m.label));
    out.push_str(&serialize_body(m));
    out
}

/// Everything except the label; canonical comparisons use this so that
/// naming does not influence which orbit member is the representative.
pub fn serialize_body(m: &Model) -> String {
    let mut out = String::new();
    out.push_str(&format!("dimension: {}\n", m.dimension));
    out.push_str(&format!("nonneg_axes: {}\n", m.nonneg_axes));
    out.push_str(&format!("moduli: {}\n", join_ints(&m.moduli)));
    for p in &m.residue_polys {
        out.push_str(&format!(
            "residue_poly: {} ; {} ; {}\n",
            p.constant,
            join_ints(&p.position),
            p.time
        ));
    }
    out.push_str(&format!("start: {}\n", join_ints(&m.start)));
    for (r, steps) in &m.step_sets {
        let key: Vec<String> = r.iter().map(|x| x.to_string()).collect();
        let rendered: Vec<String> = steps.iter().map(render_step).collect();
        out.push_str(&format!("steps {}: {}\n", key.join(","), rendered.join(", ")));
    }
    out
}

fn render_step(s: &Step) -> String {
    let coords = join_ints(&s.disp);
    if s.weight.is_one() {
        coords
    } else {
        format!("{} {}", coords, rational_to_string(&s.weight))
    }
}

fn join_ints(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rational_from_parts;

    #[test]
    fn round_trip_with_weights() {
        let text = "label: weighted\n\
                    dimension: 2\n\
                    nonneg_axes: 2\n\
                    moduli: 1\n\
                    residue_poly: 0 ; 0 0 ; 0\n\
                    start: 0 0\n\
                    steps 0: 0 1 2/3, 1 0, -1 0 4\n";
        let m = parse_model(text).unwrap();
        assert_eq!(m.steps_of(&[0]).len(), 3);
        let n = m.steps_of(&[0]).iter().find(|s| s.disp == vec![0, 1]).unwrap();
        assert_eq!(n.weight, rational_from_parts(2, 3));
        let again = parse_model(&serialize_model(&m)).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn serialization_is_canonical() {
        // steps listed in scrambled order serialize in compass order
        let text = "label: t\n\
                    dimension: 2\n\
                    nonneg_axes: 2\n\
                    moduli: 1\n\
                    residue_poly: 0 ; 0 0 ; 0\n\
                    start: 0 0\n\
                    steps 0: -1 0, 0 1, 1 1\n";
        let m = parse_model(text).unwrap();
        let s = serialize_model(&m);
        assert!(s.contains("steps 0: 0 1, 1 1, -1 0\n"), "got {}", s);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "label: t\ndimension: 2\nnonneg_axes: 1\nbogus: 3\n";
        match parse_model(text) {
            Err(ModelError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {:?}", other),
        }
    }

    #[test]
    fn unreduced_residue_key_rejected() {
        let text = "label: t\n\
                    dimension: 1\n\
                    nonneg_axes: 1\n\
                    moduli: 2\n\
                    residue_poly: 0 ; 1 ; 0\n\
                    start: 0\n\
                    steps 2: 1\n";
        assert!(matches!(parse_model(text), Err(ModelError::Semantic(_))));
    }
}
