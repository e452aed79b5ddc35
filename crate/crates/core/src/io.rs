//! JSON input documents (systems, curves, functions) and their schemas.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::parse::parse_expr;
use crate::algebra::{AlgebraError, HomPoly, MRat, ParseError, PolyLiteral};
use crate::nevanlinna::curve::ComponentLiteral;
use crate::nevanlinna::{CurveLiteral, EntireCurve, ExpPoly, MeroFn, NevanlinnaError};
use crate::resultant::{HypersurfaceFamily, ResultantError};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: JSON syntax error at line {line}, column {column}: {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: schema violation at line {line}, column {column}: {message}")]
    Schema {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {location}: {source}")]
    Algebra {
        path: String,
        location: String,
        #[source]
        source: AlgebraError,
    },
    #[error("{path}: {location}: {source}")]
    Expression {
        path: String,
        location: String,
        #[source]
        source: ParseError,
    },
    #[error("{path}: {source}")]
    Family {
        path: String,
        #[source]
        source: ResultantError,
    },
    #[error("{path}: {source}")]
    Curve {
        path: String,
        #[source]
        source: NevanlinnaError,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

/// `path` is only used to label error messages.
pub fn parse_document<T: DeserializeOwned>(text: &str, path: &str) -> Result<T, InputError> {
    serde_json::from_str(text).map_err(|e| {
        let (line, column, message) = (e.line(), e.column(), e.to_string());
        let path = path.to_string();
        match e.classify() {
            serde_json::error::Category::Data => InputError::Schema {
                path,
                line,
                column,
                message,
            },
            _ => InputError::Syntax {
                path,
                line,
                column,
                message,
            },
        }
    })
}

/// `{"n": n, "forms": [PolyLiteral, …]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemLiteral {
    pub n: usize,
    pub forms: Vec<PolyLiteral>,
}

impl SystemLiteral {
    pub fn from_family(fam: &HypersurfaceFamily) -> Self {
        SystemLiteral {
            n: fam.n(),
            forms: fam.forms().iter().map(HomPoly::to_literal).collect(),
        }
    }

    pub fn to_family(&self, path: &str) -> Result<HypersurfaceFamily, InputError> {
        let mut forms = Vec::with_capacity(self.forms.len());
        for (j, lit) in self.forms.iter().enumerate() {
            if let Some((k, t)) = lit.terms.iter().enumerate().find(|(_, t)| t.exp.len() != self.n + 1) {
                return Err(InputError::Invalid {
                    path: path.into(),
                    message: format!(
                        "forms[{j}].terms[{k}]: exponent has {} entries, expected n+1 = {}",
                        t.exp.len(),
                        self.n + 1
                    ),
                });
            }
            let f = HomPoly::from_literal(lit).map_err(|source| InputError::Algebra {
                path: path.into(),
                location: format!("forms[{j}]"),
                source,
            })?;
            forms.push(f);
        }
        HypersurfaceFamily::new(self.n, forms).map_err(|source| InputError::Family {
            path: path.into(),
            source,
        })
    }
}

pub fn read_system(text: &str, path: &str) -> Result<HypersurfaceFamily, InputError> {
    parse_document::<SystemLiteral>(text, path)?.to_family(path)
}

pub fn read_curve(text: &str, path: &str) -> Result<EntireCurve, InputError> {
    let lit: CurveLiteral = parse_document(text, path)?;
    EntireCurve::from_literal(&lit).map_err(|source| InputError::Curve {
        path: path.into(),
        source,
    })
}

/// A one-variable function `numerator / denominator` with an
/// exponential-polynomial numerator and a polynomial denominator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionLiteral {
    pub numerator: ComponentLiteral,
    #[serde(default = "one_string")]
    pub denominator: String,
}

fn one_string() -> String {
    "1".into()
}

pub fn read_function(text: &str, path: &str) -> Result<MeroFn, InputError> {
    let lit: FunctionLiteral = parse_document(text, path)?;
    let curve = CurveLiteral {
        components: vec![
            lit.numerator.clone(),
            ComponentLiteral {
                terms: vec![crate::nevanlinna::curve::ExpTermLiteral {
                    poly: lit.denominator.clone(),
                    exp_coef: "0".into(),
                }],
            },
        ],
    };
    let pair = EntireCurve::from_literal(&curve).map_err(|source| InputError::Curve {
        path: path.into(),
        source,
    })?;
    let num: ExpPoly = pair.components()[0].clone();
    let den = pair.components()[1].as_poly().filter(|p| !p.is_zero()).ok_or(InputError::Invalid {
        path: path.into(),
        message: "denominator must be a nonzero polynomial".into(),
    })?;
    Ok(MeroFn::new(num, den))
}

/// `{"m": m, "functions": ["z1", "z1*z2", …]}`: rational functions in the
/// parameters `z1, …, zm` (`z` alone when `m = 1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionsLiteral {
    pub m: usize,
    pub functions: Vec<String>,
}

pub fn read_functions(text: &str, path: &str) -> Result<Vec<MRat>, InputError> {
    let lit: FunctionsLiteral = parse_document(text, path)?;
    if lit.m == 0 || lit.functions.is_empty() {
        return Err(InputError::Invalid {
            path: path.into(),
            message: "need m >= 1 and at least one function".into(),
        });
    }
    lit.functions
        .iter()
        .enumerate()
        .map(|(k, s)| {
            parse_expr(s)
                .and_then(|e| e.to_mrat(lit.m))
                .map_err(|source| InputError::Expression {
                    path: path.into(),
                    location: format!("functions[{k}]"),
                    source,
                })
        })
        .collect()
}

fn poly_schema() -> Value {
    json!({
        "type": "object",
        "required": ["degree", "terms"],
        "properties": {
            "degree": {"type": "integer", "minimum": 0},
            "terms": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["exp", "coef"],
                    "properties": {
                        "exp": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                        "coef": {"type": "string", "description": "\"p/q\", \"a+bi\" or a rational expression in z"}
                    }
                }
            }
        }
    })
}

fn component_schema() -> Value {
    json!({
        "type": "object",
        "required": ["terms"],
        "properties": {
            "terms": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["poly", "exp_coef"],
                    "properties": {
                        "poly": {"type": "string", "description": "polynomial in z"},
                        "exp_coef": {"type": "string", "description": "constant c in e^{cz}, e.g. \"1\", \"2i\", \"1/2-i\""}
                    }
                }
            }
        }
    })
}

const DRAFT: &str = "https://json-schema.org/draft/2020-12/schema";

pub fn system_schema() -> Value {
    json!({
        "$schema": DRAFT,
        "title": "system",
        "type": "object",
        "required": ["n", "forms"],
        "additionalProperties": false,
        "properties": {
            "n": {"type": "integer", "minimum": 1, "description": "forms live in n+1 variables"},
            "forms": {"type": "array", "items": poly_schema()}
        }
    })
}

pub fn curve_schema() -> Value {
    json!({
        "$schema": DRAFT,
        "title": "curve",
        "type": "object",
        "required": ["components"],
        "properties": {
            "components": {"type": "array", "minItems": 2, "items": component_schema()}
        }
    })
}

pub fn function_schema() -> Value {
    json!({
        "$schema": DRAFT,
        "title": "function",
        "type": "object",
        "required": ["numerator"],
        "additionalProperties": false,
        "properties": {
            "numerator": component_schema(),
            "denominator": {"type": "string", "default": "1", "description": "polynomial in z"}
        }
    })
}

pub fn functions_schema() -> Value {
    json!({
        "$schema": DRAFT,
        "title": "functions",
        "type": "object",
        "required": ["m", "functions"],
        "additionalProperties": false,
        "properties": {
            "m": {"type": "integer", "minimum": 1},
            "functions": {"type": "array", "minItems": 1, "items": {"type": "string"}}
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYS: &str = r#"{"n": 1, "forms": [
        {"degree": 1, "terms": [{"exp": [1, 0], "coef": "1"}]},
        {"degree": 1, "terms": [{"exp": [0, 1], "coef": "1"}]},
        {"degree": 1, "terms": [{"exp": [1, 0], "coef": "1"}, {"exp": [0, 1], "coef": "1/(z+10)"}]}
    ]}"#;

    #[test]
    fn system_round_trip() {
        let fam = read_system(SYS, "sys.json").unwrap();
        assert_eq!((fam.n(), fam.q(), fam.is_fixed()), (1, 3, false));
        let back = serde_json::to_string(&SystemLiteral::from_family(&fam)).unwrap();
        assert_eq!(read_system(&back, "x").unwrap(), fam);
    }

    #[test]
    fn errors_carry_positions() {
        let e = read_system("{\"n\": 1,\n \"forms\": [}", "bad.json").unwrap_err();
        assert!(matches!(e, InputError::Syntax { line: 2, .. }), "{e}");
        let e = read_system(r#"{"n": "one", "forms": []}"#, "bad.json").unwrap_err();
        assert!(matches!(e, InputError::Schema { line: 1, .. }), "{e}");
        let e = read_system(
            r#"{"n": 1, "forms": [{"degree": 1, "terms": [{"exp": [1, 0], "coef": "2+*"}]}]}"#,
            "bad.json",
        )
        .unwrap_err();
        assert!(e.to_string().contains("position"), "{e}");
        let e = read_system(r#"{"n": 2, "forms": [{"degree": 1, "terms": [{"exp": [1, 0], "coef": "1"}]}]}"#, "b")
            .unwrap_err();
        assert!(e.to_string().contains("forms[0].terms[0]"), "{e}");
    }

    #[test]
    fn functions_and_curves() {
        let phi = read_function(
            r#"{"numerator": {"terms": [{"poly": "z-2", "exp_coef": "0"}]}, "denominator": "z+3"}"#,
            "f",
        )
        .unwrap();
        assert_eq!(phi.denom().degree(), Some(1));
        let fs = read_functions(r#"{"m": 2, "functions": ["1", "z1", "z2"]}"#, "g").unwrap();
        assert_eq!(fs.len(), 3);
        let c = read_curve(
            r#"{"components": [{"terms": [{"poly": "1", "exp_coef": "0"}]}, {"terms": [{"poly": "1", "exp_coef": "1"}]}]}"#,
            "c",
        )
        .unwrap();
        assert_eq!(c.n(), 1);
    }
}
