//! JSON and CSV forms shared by the library and the command-line front end.
//!
//! Rationals always travel as strings. Exact coefficients are written as
//! `["num/den", "num/den"]` pairs; float coefficients as `[re, im]` numbers.
//! Readers accept both forms for either scalar type.

use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::error::{HbError, Result};
use crate::fourier_pw::{DensityFit, MomentFunctional};
use crate::index_core::VectorIndex;
use crate::linear_dynamics::{ChaosCertificate, ConvolutionOperator, SymbolSample};
use crate::scalar::{format_rational, parse_rational, rational_from_f64, ExactComplex, Scalar};
use crate::series_engine::{CertificateSource, ExpTypeCertificate, REvenSeries};

/// Scalars with a JSON form.
pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

fn component(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n
            .as_f64()
            .map(rational_from_f64)
            .ok_or_else(|| HbError::Argument(format!("bad number {n}"))),
        other => Err(HbError::Argument(format!("expected a number or rational string, got {other}"))),
    }
}

fn pair(v: &Value) -> Result<(&Value, &Value)> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok((re, im)),
        // A bare real is accepted as `[x, 0]`.
        _ if v.is_number() || v.is_string() => Ok((v, &Value::Null)),
        _ => Err(HbError::Argument(format!("expected [re, im], got {v}"))),
    }
}

impl JsonScalar for ExactComplex {
    fn to_json(&self) -> Value {
        json!([format_rational(&self.re), format_rational(&self.im)])
    }

    fn from_json(v: &Value) -> Result<Self> {
        let (re, im) = pair(v)?;
        let im = if im.is_null() { BigRational::from_integer(0.into()) } else { component(im)? };
        Ok(ExactComplex::new(component(re)?, im))
    }
}

impl JsonScalar for Complex64 {
    fn to_json(&self) -> Value {
        json!([float(self.re), float(self.im)])
    }

    fn from_json(v: &Value) -> Result<Self> {
        Ok(ExactComplex::from_json(v)?.to_c64())
    }
}

/// Non-finite floats become strings, since JSON has no encoding for them.
fn float(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn complex(z: Complex64) -> Value {
    json!([float(z.re), float(z.im)])
}

pub fn gamma_to_json(vi: &VectorIndex) -> Value {
    Value::Array(
        vi.gamma()
            .iter()
            .map(|g| json!([g.numer().to_string(), g.denom().to_string()]))
            .collect(),
    )
}

/// Accepts `["num", "den"]` pairs or `"p/q"` strings.
pub fn gamma_from_json(v: &Value) -> Result<Vec<BigRational>> {
    let items = v
        .as_array()
        .ok_or_else(|| HbError::Argument("gamma must be an array".into()))?;
    items
        .iter()
        .map(|g| match g {
            Value::Array(p) if p.len() == 2 => {
                let num = p[0].as_str().map(str::to_owned).unwrap_or_else(|| p[0].to_string());
                let den = p[1].as_str().map(str::to_owned).unwrap_or_else(|| p[1].to_string());
                parse_rational(&format!("{num}/{den}"))
            }
            Value::String(s) => parse_rational(s),
            other => Err(HbError::Argument(format!("bad gamma entry {other}"))),
        })
        .collect()
}

pub fn vi_from_json(obj: &Value) -> Result<VectorIndex> {
    let r = obj
        .get("r")
        .and_then(Value::as_u64)
        .ok_or_else(|| HbError::Argument("missing integer field r".into()))?;
    let gamma = gamma_from_json(obj.get("gamma").unwrap_or(&Value::Array(Vec::new())))?;
    VectorIndex::new(r as usize, gamma)
}

pub fn certificate_to_json(cert: Option<&ExpTypeCertificate>) -> Value {
    match cert {
        Some(c) => json!({"C": float(c.c), "a": float(c.a), "source": source_name(c.source)}),
        None => Value::Null,
    }
}

fn source_name(s: CertificateSource) -> &'static str {
    match s {
        CertificateSource::Declared => "declared",
        CertificateSource::Fitted => "fitted",
        CertificateSource::Heuristic => "heuristic",
    }
}

pub fn certificate_from_json(v: &Value) -> Result<Option<ExpTypeCertificate>> {
    if v.is_null() {
        return Ok(None);
    }
    let num = |key: &str| {
        v.get(key)
            .and_then(Value::as_f64)
            .ok_or_else(|| HbError::Argument(format!("certificate needs numeric {key}")))
    };
    let source = match v.get("source").and_then(Value::as_str) {
        None | Some("declared") => CertificateSource::Declared,
        Some("fitted") => CertificateSource::Fitted,
        Some("heuristic") => CertificateSource::Heuristic,
        Some(other) => return Err(HbError::Argument(format!("unknown certificate source {other}"))),
    };
    ExpTypeCertificate::new(num("C")?, num("a")?, source).map(Some)
}

pub fn series_to_json<S: JsonScalar>(u: &REvenSeries<S>) -> Value {
    let mut obj = Map::new();
    obj.insert("r".into(), json!(u.vi().r()));
    obj.insert("gamma".into(), gamma_to_json(u.vi()));
    obj.insert("basis".into(), json!("normalized"));
    obj.insert("coeffs".into(), Value::Array(u.coeffs().iter().map(S::to_json).collect()));
    if let Some(c) = u.certificate() {
        obj.insert("certificate".into(), certificate_to_json(Some(c)));
    }
    Value::Object(obj)
}

/// `basis` may be `"normalized"` (default) or `"monomial"` (raw `z^{rn}` coefficients).
pub fn series_from_json<S: JsonScalar>(v: &Value) -> Result<REvenSeries<S>> {
    let vi = vi_from_json(v)?;
    let coeffs = v
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| HbError::Argument("series needs a coeffs array".into()))?
        .iter()
        .map(S::from_json)
        .collect::<Result<Vec<S>>>()?;
    let series = match v.get("basis").and_then(Value::as_str).unwrap_or("normalized") {
        "normalized" => REvenSeries::new(vi, coeffs),
        "monomial" => REvenSeries::from_raw(vi, coeffs),
        other => return Err(HbError::Argument(format!("unknown basis {other}"))),
    };
    Ok(match certificate_from_json(v.get("certificate").unwrap_or(&Value::Null))? {
        Some(c) => series.with_certificate(c),
        None => series,
    })
}

pub fn functional_to_json<S: JsonScalar>(t: &MomentFunctional<S>) -> Value {
    json!({
        "r": t.vi().r(),
        "gamma": gamma_to_json(t.vi()),
        "moments": t.moments().iter().map(S::to_json).collect::<Vec<_>>(),
        "certificate": certificate_to_json(t.certificate()),
    })
}

pub fn functional_from_json<S: JsonScalar>(v: &Value) -> Result<MomentFunctional<S>> {
    let vi = vi_from_json(v)?;
    let moments = v
        .get("moments")
        .and_then(Value::as_array)
        .ok_or_else(|| HbError::Argument("functional needs a moments array".into()))?
        .iter()
        .map(S::from_json)
        .collect::<Result<Vec<S>>>()?;
    let cert = certificate_from_json(v.get("certificate").unwrap_or(&Value::Null))?;
    MomentFunctional::new(vi, moments, cert)
}

pub fn operator_to_json(l: &ConvolutionOperator<Complex64>) -> Value {
    json!({
        "r": l.vi().r(),
        "gamma": gamma_to_json(l.vi()),
        "symbol": l.symbol().iter().map(|b| complex(*b)).collect::<Vec<_>>(),
        "certificate": certificate_to_json(Some(l.certificate())),
    })
}

fn samples(list: &[SymbolSample]) -> Value {
    Value::Array(
        list.iter()
            .map(|s| json!({"lambda": complex(s.lambda), "psi": complex(s.psi)}))
            .collect(),
    )
}

pub fn chaos_certificate_to_json(cert: &ChaosCertificate) -> Value {
    let t = &cert.transitivity;
    json!({
        "operator": operator_to_json(&cert.operator),
        "A_samples": samples(&cert.a_samples),
        "B_samples": samples(&cert.b_samples),
        "periodic_tolerance": float(cert.periodic_tolerance),
        "periodic_points": cert.periodic_points.iter().map(|p| json!({
            "lambda": complex(p.point.lambda),
            "alpha": p.point.alpha.to_string(),
            "period": p.point.period,
            "newton_residual": float(p.point.newton_residual),
            "residual": float(p.residual),
        })).collect::<Vec<_>>(),
        "transitivity": {
            "h": series_to_json(&t.h),
            "g": series_to_json(&t.g),
            "eps": float(t.eps),
            "R": float(t.radius),
            "N": t.iterations,
            "nodes_per_set": t.nodes_per_set,
            "A_nodes": t.a_nodes.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
            "B_nodes": t.b_nodes.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
            "witness": series_to_json(&t.witness),
            "residual_start": float(t.residual_start),
            "residual_end": float(t.residual_end),
            "majorant_start": float(t.majorant_start),
            "majorant_end": float(t.majorant_end),
            "regularized": t.regularized,
        },
    })
}

/// Columns `lambda_re,lambda_im,c_re,c_im`, then `residual,<rms>,sup,<grid sup>`.
pub fn density_csv(nodes: &[Complex64], fit: &DensityFit) -> String {
    let mut out = String::from("lambda_re,lambda_im,c_re,c_im\n");
    for (lam, c) in nodes.iter().zip(&fit.coefficients) {
        out.push_str(&format!("{:e},{:e},{:e},{:e}\n", lam.re, lam.im, c.re, c.im));
    }
    out.push_str(&format!("residual,{:e},sup,{:e}\n", fit.residual, fit.sup_residual));
    out
}
