//! JSON form of jets: `{"nvars":n, "order":D, "terms":[{"exp":[…], "re":"…", "im":"…"}]}`.

use serde::{Deserialize, Serialize};

use crate::number::Cx;
use crate::poly::parse_rational;

use super::{Jet, JetCtx};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetTermJson {
    pub exp: Vec<u32>,
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

fn zero_string() -> String {
    "0".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetJson {
    pub nvars: usize,
    pub order: u32,
    pub terms: Vec<JetTermJson>,
}

/// Serializes with decimal strings that round-trip at the jet's precision.
pub fn jet_to_json(j: &Jet) -> JetJson {
    JetJson {
        nvars: j.nvars(),
        order: j.order(),
        terms: j
            .terms()
            .map(|(m, c)| {
                let (re, im) = c.to_decimal_strings();
                JetTermJson { exp: m.0.clone(), re, im }
            })
            .collect(),
    }
}

/// Parses a jet; coefficient strings may be decimals or exact `p/q` rationals.
pub fn jet_from_json(js: &JetJson, ctx: JetCtx) -> Result<Jet, String> {
    let mut terms = Vec::with_capacity(js.terms.len());
    for t in &js.terms {
        if t.exp.len() != js.nvars {
            return Err(format!("exponent {:?} does not have {} entries", t.exp, js.nvars));
        }
        if t.exp.iter().sum::<u32>() > js.order {
            return Err(format!("exponent {:?} exceeds order {}", t.exp, js.order));
        }
        let re = parse_rational(&t.re).ok_or_else(|| format!("bad number '{}'", t.re))?;
        let im = parse_rational(&t.im).ok_or_else(|| format!("bad number '{}'", t.im))?;
        terms.push((t.exp.clone(), Cx::from_rationals(&re, &im, ctx.prec)));
    }
    Ok(Jet::from_terms(js.nvars, js.order, ctx, terms))
}
