//! JSON encodings of the library objects.
//!
//! Ring elements are coordinate lists in the power basis of W_n(F_{p^m}) over
//! Z/p^n; a bare integer is accepted wherever a coordinate list is. Rationals
//! are strings "s/r" in lowest terms. Objects are `serde_json::Value` maps,
//! whose keys serialize in sorted order.

use num_rational::Ratio;
use serde_json::{json, Value};

use crate::deformation::{DeformationMap, DeformedRelations, FirstOrder, LinearForm, NormanDatum, TangentAction};
use crate::error::{Error, Result};
use crate::fields::{FqElement, FqField, Tower};
use crate::isocrystal::{SlopeSequence, TwistedPoly};
use crate::matrix::Matrix;
use crate::supersingular::SurfaceParameter;
use crate::witt::{WittElement, WittRing};

fn bad(what: &str) -> Error {
    Error::Parse(format!("malformed JSON: {what}"))
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(&format!("missing key {key:?}")))
}

fn get_u64(v: &Value, key: &str) -> Result<u64> {
    get(v, key)?.as_u64().ok_or_else(|| bad(&format!("{key:?} must be a nonnegative integer")))
}

pub fn rational(q: &Ratio<i64>) -> Value {
    Value::String(q.to_string())
}

pub fn slopes(s: &SlopeSequence) -> Value {
    Value::Array(s.entries.iter().map(|(l, m)| json!([l.to_string(), m])).collect())
}

pub fn fq(x: &FqElement) -> Value {
    json!({"p": x.field().p(), "m": x.field().degree(), "coeffs": x.coeffs()})
}

pub fn fq_from(tower: &Tower, v: &Value) -> Result<FqElement> {
    let field = tower.field(get_u64(v, "p")?, get_u64(v, "m")? as usize)?;
    fq_entry(&field, get(v, "coeffs")?)
}

fn fq_entry(field: &FqField, v: &Value) -> Result<FqElement> {
    let p = field.p() as i64;
    match v {
        Value::Number(_) => Ok(field.from_int(v.as_i64().ok_or_else(|| bad("integer entry"))?)),
        Value::Array(items) => {
            let c = items
                .iter()
                .map(|x| x.as_i64().map(|c| c.rem_euclid(p) as u64).ok_or_else(|| bad("integer coordinate")))
                .collect::<Result<Vec<_>>>()?;
            field.from_coeffs(&c)
        }
        _ => Err(bad("field entry must be an integer or a coordinate list")),
    }
}

pub fn ring(w: &WittRing) -> Value {
    json!({"p": w.p(), "m": w.degree(), "n": w.n()})
}

pub fn ring_from(tower: &Tower, v: &Value) -> Result<WittRing> {
    let n = get_u64(v, "n")?;
    let n = u32::try_from(n).map_err(|_| bad("precision too large"))?;
    tower.witt_ring(get_u64(v, "p")?, get_u64(v, "m")? as usize, n)
}

fn entry(x: &WittElement) -> Value {
    json!(x.coeffs())
}

fn entry_from(w: &WittRing, v: &Value) -> Result<WittElement> {
    let reduce = |x: &Value| -> Result<u64> {
        if let Some(u) = x.as_u64() {
            return Ok(w.zpn().reduce_i128(u as i128));
        }
        x.as_i64().map(|i| w.zpn().reduce_i128(i as i128)).ok_or_else(|| bad("integer coordinate"))
    };
    match v {
        Value::Number(_) => w.from_coeffs(&[reduce(v)?]),
        Value::Array(items) => w.from_coeffs(&items.iter().map(reduce).collect::<Result<Vec<_>>>()?),
        _ => Err(bad("ring entry must be an integer or a coordinate list")),
    }
}

pub fn witt(x: &WittElement) -> Value {
    let w = x.ring();
    json!({"p": w.p(), "m": w.degree(), "n": w.n(), "coeffs": x.coeffs()})
}

pub fn witt_from(tower: &Tower, v: &Value) -> Result<WittElement> {
    let w = ring_from(tower, v)?;
    entry_from(&w, get(v, "coeffs")?)
}

fn matrix_rows(a: &Matrix) -> Value {
    Value::Array((0..a.rows()).map(|r| Value::Array(a.row(r).iter().map(entry).collect())).collect())
}

fn matrix_from(w: &WittRing, v: &Value, rows: usize, cols: usize) -> Result<Matrix> {
    let rv = v.as_array().ok_or_else(|| bad("matrix must be a list of rows"))?;
    if rv.len() != rows {
        return Err(Error::DimensionMismatch(format!("{} rows, expected {rows}", rv.len())));
    }
    let mut out = Vec::with_capacity(rows);
    for r in rv {
        let cells = r.as_array().ok_or_else(|| bad("row must be a list"))?;
        if cells.len() != cols {
            return Err(Error::DimensionMismatch(format!("row of length {}, expected {cols}", cells.len())));
        }
        out.push(cells.iter().map(|c| entry_from(w, c)).collect::<Result<Vec<_>>>()?);
    }
    Matrix::from_rows(w, out)
}

/// {"ring", "h", "A"}; column j of A is F(e_j).
pub fn module(a: &Matrix) -> Value {
    json!({"ring": ring(a.ring()), "h": a.rows(), "A": matrix_rows(a)})
}

pub fn module_from(tower: &Tower, v: &Value) -> Result<Matrix> {
    let w = ring_from(tower, get(v, "ring")?)?;
    let h = get_u64(v, "h")? as usize;
    matrix_from(&w, get(v, "A")?, h, h)
}

/// {"ring", "coeffs"} with coeffs[i] the coefficient of F^(deg - i).
pub fn poly(p: &TwistedPoly) -> Result<Value> {
    let c = p.unramified_coeffs()?;
    let w = c[0].ring().clone();
    Ok(json!({"ring": ring(&w), "coeffs": c.iter().map(entry).collect::<Vec<_>>()}))
}

pub fn poly_from(tower: &Tower, v: &Value) -> Result<TwistedPoly> {
    let w = ring_from(tower, get(v, "ring")?)?;
    let c = get(v, "coeffs")?.as_array().ok_or_else(|| bad("coeffs must be a list"))?;
    let c = c.iter().map(|x| entry_from(&w, x)).collect::<Result<Vec<_>>>()?;
    if c.len() < 2 || c[0] != w.one() {
        return Err(Error::NotMonic("polynomial must be monic of positive degree".into()));
    }
    TwistedPoly::from_witt(&c)
}

/// {"ring", "g", "h", "A"} in Norman's row convention.
pub fn norman(b: &NormanDatum) -> Value {
    json!({"ring": ring(b.ring()), "g": b.g(), "h": b.h(), "A": matrix_rows(b.matrix())})
}

pub fn norman_from(tower: &Tower, v: &Value) -> Result<NormanDatum> {
    let w = ring_from(tower, get(v, "ring")?)?;
    if v.get("superspecial").and_then(Value::as_u64).is_some() {
        let g = get_u64(v, "superspecial")? as usize;
        if g == 0 {
            return Err(Error::DimensionMismatch("g must be positive".into()));
        }
        return Ok(NormanDatum::superspecial(&w, g));
    }
    let g = get_u64(v, "g")? as usize;
    let h = get_u64(v, "h")? as usize;
    NormanDatum::new(g, h, matrix_from(&w, get(v, "A")?, g + h, g + h)?)
}

/// {"universal": true} or {"d": h x g residue entries}, the latter read
/// over k[t]/(t^2) as d = c t.
pub fn deformation_map_from(base: &NormanDatum, v: &Value) -> Result<DeformationMap> {
    let field = base.ring().field();
    if v.get("universal").and_then(Value::as_bool) == Some(true) {
        if base.g() != base.h() {
            return Err(Error::NotSuperspecialShape("universal map needs g = h".into()));
        }
        return Ok(DeformationMap::universal(field, base.g()));
    }
    let rows = get(v, "d")?.as_array().ok_or_else(|| bad("d must be a list of rows"))?;
    let c = rows
        .iter()
        .map(|r| {
            r.as_array().ok_or_else(|| bad("row must be a list"))?.iter().map(|x| fq_entry(field, x)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DeformationMap::from_residues(field, &c))
}

fn linear_form(f: &LinearForm) -> Value {
    Value::Array(f.coeffs.iter().map(|c| json!(c.coeffs())).collect())
}

fn first_order(x: &FirstOrder) -> Value {
    json!({"base": entry(&x.base), "eps": linear_form(&x.eps)})
}

pub fn relations(r: &DeformedRelations) -> Value {
    let rows = |range: std::ops::Range<usize>| -> Value {
        Value::Array(range.map(|i| Value::Array(r.rows[i].iter().map(first_order).collect())).collect())
    };
    json!({"g": r.g, "h": r.h, "frobenius_rows": rows(0..r.g), "verschiebung_rows": rows(r.g..r.g + r.h)})
}

pub fn tangent(t: &TangentAction) -> Value {
    let constant: Vec<Value> = t.constant.iter().map(|row| Value::Array(row.iter().map(|c| json!(c.coeffs())).collect())).collect();
    let linear: Vec<Value> = t.linear.iter().map(|row| Value::Array(row.iter().map(linear_form).collect())).collect();
    json!({
        "constant": constant,
        "linear": linear,
        "linear_rank": t.linear_rank(),
        "cuts_out_origin": t.cuts_out_origin(),
    })
}

pub fn parameter(t: &SurfaceParameter) -> Value {
    match t {
        SurfaceParameter::Point { a, b } => json!({"a": a.coeffs(), "b": b.coeffs(), "m": a.field().degree()}),
        SurfaceParameter::Generic => json!("generic"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dieudonne::{std_module, StdKind};

    #[test]
    fn round_trips() {
        let tower = Tower::default();
        let w = tower.witt_ring(3, 2, 5).unwrap();
        let m = std_module(StdKind::Mab(2, 1), &w).unwrap().lattice();
        let v = module(m.matrix());
        let text = serde_json::to_string(&v).unwrap();
        let back = module_from(&tower, &serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(&back, m.matrix());
        let x = w.generator().add(&w.from_int(-7));
        assert_eq!(witt_from(&tower, &witt(&x)).unwrap(), x);
        let f = tower.field(5, 3).unwrap();
        let y = f.generator().pow(17);
        assert_eq!(fq_from(&tower, &fq(&y)).unwrap(), y);
        let p = TwistedPoly::from_ints(&w, &[1, -4, 3]).unwrap();
        assert_eq!(poly_from(&tower, &poly(&p).unwrap()).unwrap(), p);
        let b = NormanDatum::superspecial(&w, 2);
        assert_eq!(norman_from(&tower, &norman(&b)).unwrap(), b);
    }

    #[test]
    fn keys_are_sorted_and_integers_accepted() {
        let tower = Tower::default();
        let v: Value = serde_json::from_str(r#"{"ring":{"p":2,"m":1,"n":4},"h":2,"A":[[0,2],[1,0]]}"#).unwrap();
        let a = module_from(&tower, &v).unwrap();
        assert_eq!(serde_json::to_string(&module(&a)).unwrap(), r#"{"A":[[[0],[2]],[[1],[0]]],"h":2,"ring":{"m":1,"n":4,"p":2}}"#);
        let bad: Value = serde_json::from_str(r#"{"ring":{"p":2,"m":1,"n":4},"h":2,"A":[[0,2]]}"#).unwrap();
        assert!(matches!(module_from(&tower, &bad), Err(Error::DimensionMismatch(_))));
        assert_eq!(rational(&Ratio::new(10, 24)), json!("5/12"));
    }
}
