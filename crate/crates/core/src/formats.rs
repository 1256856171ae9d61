//! JSON documents for germs, actions and unfoldings.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::group::{ActionSpec, SignAction};
use crate::poly::{
    parse_rational, CoeffKind, FloatJet, Jet, JetError, MultiIndex, RationalJet, Scalar,
};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
    #[error("term {index}: cannot read coefficient {value} as {kind}")]
    Coefficient {
        index: usize,
        value: String,
        kind: CoeffKind,
    },
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("action: {0}")]
    Action(String),
    #[error("germ is not invariant under the action: term {0}")]
    NotInvariant(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermSpec {
    pub exp: Vec<u32>,
    pub coeff: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GermSpec {
    pub vars: Vec<String>,
    pub order: u32,
    #[serde(default = "default_kind")]
    pub coeff_kind: CoeffKind,
    pub terms: Vec<TermSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionSpec>,
}

fn default_kind() -> CoeffKind {
    CoeffKind::Rational
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnfoldingSpec {
    pub germ: GermSpec,
    #[serde(default)]
    pub params: Vec<String>,
    pub alphas: Vec<GermSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionSpec>,
}

/// A jet over either coefficient field.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyJet {
    Rational(RationalJet),
    Float(FloatJet),
}

impl AnyJet {
    pub fn nvars(&self) -> usize {
        match self {
            AnyJet::Rational(j) => j.nvars(),
            AnyJet::Float(j) => j.nvars(),
        }
    }

    pub fn kind(&self) -> CoeffKind {
        match self {
            AnyJet::Rational(_) => CoeffKind::Rational,
            AnyJet::Float(_) => CoeffKind::Float,
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        match self {
            AnyJet::Rational(j) => j.render(names),
            AnyJet::Float(j) => j.render(names),
        }
    }

    fn non_invariant(&self, action: &SignAction) -> Option<MultiIndex> {
        match self {
            AnyJet::Rational(j) => action.non_invariant_terms(j).into_iter().next(),
            AnyJet::Float(j) => action.non_invariant_terms(j).into_iter().next(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Germ {
    pub vars: Vec<String>,
    pub jet: AnyJet,
    /// Action declared in the file, if any.
    pub action: Option<ActionSpec>,
}

impl Germ {
    /// Builds `over` (or the declared action, or the full action) and checks
    /// invariance.
    pub fn resolve_action(&self, over: Option<&ActionSpec>) -> Result<SignAction, FormatError> {
        let spec = over
            .or(self.action.as_ref())
            .cloned()
            .unwrap_or(ActionSpec::Named("full".into()));
        let action = spec.build(self.vars.len()).map_err(FormatError::Action)?;
        if let Some(m) = self.jet.non_invariant(&action) {
            return Err(FormatError::NotInvariant(m.render(&self.vars)));
        }
        Ok(action)
    }
}

fn bad_coeff(index: usize, v: &Value, kind: CoeffKind) -> FormatError {
    FormatError::Coefficient {
        index,
        value: v.to_string(),
        kind,
    }
}

fn rational_coeff(index: usize, v: &Value) -> Result<BigRational, FormatError> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
        _ => None,
    }
    .ok_or_else(|| bad_coeff(index, v, CoeffKind::Rational))
}

fn float_coeff(index: usize, v: &Value) -> Result<f64, FormatError> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse::<f64>().ok(),
        _ => None,
    }
    .filter(|x| x.is_finite())
    .ok_or_else(|| bad_coeff(index, v, CoeffKind::Float))
}

fn build_jet<C: Scalar>(
    spec: &GermSpec,
    read: impl Fn(usize, &Value) -> Result<C, FormatError>,
) -> Result<Jet<C>, FormatError> {
    let n = spec.vars.len();
    let mut terms = Vec::with_capacity(spec.terms.len());
    for (i, t) in spec.terms.iter().enumerate() {
        if t.exp.len() != n {
            return Err(FormatError::Schema(format!(
                "term {i}: exponent has {} entries, expected {n}",
                t.exp.len()
            )));
        }
        terms.push((MultiIndex::new(t.exp.clone()), read(i, &t.coeff)?));
    }
    Ok(Jet::from_terms(n, spec.order, terms)?)
}

impl GermSpec {
    pub fn to_jet(&self) -> Result<AnyJet, FormatError> {
        if self.vars.is_empty() {
            return Err(FormatError::Schema(
                "germ needs at least one variable".into(),
            ));
        }
        Ok(match self.coeff_kind {
            CoeffKind::Rational => AnyJet::Rational(build_jet(self, rational_coeff)?),
            CoeffKind::Float => AnyJet::Float(build_jet(self, float_coeff)?),
        })
    }

    pub fn to_germ(&self) -> Result<Germ, FormatError> {
        Ok(Germ {
            vars: self.vars.clone(),
            jet: self.to_jet()?,
            action: self.action.clone(),
        })
    }

    /// Document for a jet; rational coefficients become `"p/q"` strings.
    pub fn from_jet<C: Scalar>(vars: &[String], jet: &Jet<C>) -> Self {
        GermSpec {
            vars: vars.to_vec(),
            order: jet.order(),
            coeff_kind: C::KIND,
            terms: jet
                .terms()
                .map(|(m, c)| TermSpec {
                    exp: m.exps().to_vec(),
                    coeff: match C::KIND {
                        CoeffKind::Rational => Value::String(c.to_coeff_string()),
                        CoeffKind::Float => serde_json::json!(c.to_f64()),
                    },
                })
                .collect(),
            action: None,
        }
    }
}

pub fn parse_germ(text: &str) -> Result<Germ, FormatError> {
    serde_json::from_str::<GermSpec>(text)?.to_germ()
}

#[derive(Debug, Clone)]
pub struct UnfoldingDoc {
    pub germ: Germ,
    pub params: Vec<String>,
    pub alphas: Vec<AnyJet>,
    pub action: Option<ActionSpec>,
}

pub fn parse_unfolding(text: &str) -> Result<UnfoldingDoc, FormatError> {
    let spec: UnfoldingSpec = serde_json::from_str(text)?;
    let germ = spec.germ.to_germ()?;
    let mut alphas = Vec::with_capacity(spec.alphas.len());
    for (i, a) in spec.alphas.iter().enumerate() {
        if a.vars != germ.vars {
            return Err(FormatError::Schema(format!(
                "alpha {} uses variables {:?}, germ uses {:?}",
                i + 1,
                a.vars,
                germ.vars
            )));
        }
        let j = a.to_jet()?;
        if j.kind() != germ.jet.kind() {
            return Err(JetError::MixedKind(germ.jet.kind(), j.kind()).into());
        }
        alphas.push(j);
    }
    let params = if spec.params.is_empty() {
        crate::unfolding::default_param_names(alphas.len())
    } else if spec.params.len() == alphas.len() {
        spec.params
    } else {
        return Err(FormatError::Schema(format!(
            "{} parameter names for {} alphas",
            spec.params.len(),
            alphas.len()
        )));
    };
    Ok(UnfoldingDoc {
        action: spec.action.or_else(|| germ.action.clone()),
        germ,
        params,
        alphas,
    })
}
