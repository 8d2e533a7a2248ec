//! JSON reading and canonical writing of circuits. The layout is described
//! in `schemas/formula.schema.json` at the repository root.

use serde_json::{json, Map, Value};

use super::{
    Circuit, ClassParams, DiagonalCircuit, DualRepresentation, Node, SetDepthFormula, Term,
};
use crate::algebra::{Exponent, Fp, MPoly, UniPoly};
use crate::error::{Error, Result};
use crate::hadamard::Partition;

pub const FORMAT_VERSION: u64 = 1;

/// Read a coefficient given as a JSON integer or a decimal string.
pub fn scalar_from_value(v: &Value) -> std::result::Result<Fp, String> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Fp::from_i64(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Fp::new(u))
            } else {
                Err(format!("{n} is not an integer"))
            }
        }
        Value::String(s) => Fp::parse(s).ok_or_else(|| format!("{s:?} is not an integer")),
        other => Err(format!("expected an integer, found {other}")),
    }
}

fn schema(path: &str, msg: impl Into<String>) -> Error {
    Error::SchemaError {
        path: path.to_string(),
        msg: msg.into(),
    }
}

fn scalar_at(v: &Value, path: &str) -> Result<Fp> {
    scalar_from_value(v).map_err(|m| schema(path, m))
}

fn uint_at(v: &Value, path: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn obj<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| schema(path, "expected an object"))
}

fn arr<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| schema(path, "expected an array"))
}

/// 1-based variable key to a 0-based index.
fn var_key(k: &str, path: &str) -> Result<usize> {
    let i: usize = k
        .parse()
        .map_err(|_| schema(path, format!("{k:?} is not a variable index")))?;
    if i == 0 {
        return Err(schema(path, "variables are numbered from 1"));
    }
    Ok(i - 1)
}

fn check_version(v: &Value) -> Result<()> {
    match v.get("version") {
        None => Err(schema("/version", "missing required field")),
        Some(x) if x.as_u64() == Some(FORMAT_VERSION) => Ok(()),
        Some(x) => Err(schema("/version", format!("unsupported version {x}"))),
    }
}

fn parse_linear(m: &Map<String, Value>, path: &str) -> Result<MPoly<Fp>> {
    let mut p = MPoly::new();
    for (k, c) in m {
        let cp = format!("{path}/{k}");
        let c = scalar_at(c, &cp)?;
        if k == "0" {
            p.add_term(Exponent::zero(), c);
        } else {
            p.add_term(Exponent::unit(var_key(k, &cp)?), c);
        }
    }
    Ok(p)
}

fn parse_sparse(terms: &[Value], path: &str) -> Result<MPoly<Fp>> {
    let mut p = MPoly::new();
    for (i, t) in terms.iter().enumerate() {
        let tp = format!("{path}/{i}");
        let t = obj(t, &tp)?;
        let c = scalar_at(
            t.get("coef").ok_or_else(|| schema(&tp, "missing coef"))?,
            &format!("{tp}/coef"),
        )?;
        let mut e = Exponent::zero();
        if let Some(ex) = t.get("exp") {
            for (k, v) in obj(ex, &format!("{tp}/exp"))? {
                let vp = format!("{tp}/exp/{k}");
                let idx = var_key(k, &vp)?;
                e.set(idx, e.get(idx) + uint_at(v, &vp)? as u32);
            }
        }
        p.add_term(e, c);
    }
    Ok(p)
}

fn parse_node(v: &Value, path: &str) -> Result<Node> {
    let m = obj(v, path)?;
    if let Some(l) = m.get("linear") {
        return Ok(Node::Leaf(parse_linear(
            obj(l, &format!("{path}/linear"))?,
            &format!("{path}/linear"),
        )?));
    }
    if let Some(s) = m.get("sparse") {
        return Ok(Node::Leaf(parse_sparse(
            arr(s, &format!("{path}/sparse"))?,
            &format!("{path}/sparse"),
        )?));
    }
    if let Some(c) = m.get("const") {
        return Ok(Node::constant(scalar_at(c, &format!("{path}/const"))?));
    }
    if let Some(ts) = m.get("terms") {
        let tp = format!("{path}/terms");
        let mut terms = Vec::new();
        for (i, t) in arr(ts, &tp)?.iter().enumerate() {
            let ip = format!("{tp}/{i}");
            let to = obj(t, &ip)?;
            let weight = match to.get("weight") {
                Some(w) => scalar_at(w, &format!("{ip}/weight"))?,
                None => Fp::one(),
            };
            let fp = format!("{ip}/factors");
            let factors = arr(
                to.get("factors")
                    .ok_or_else(|| schema(&ip, "missing factors"))?,
                &fp,
            )?
            .iter()
            .enumerate()
            .map(|(j, f)| parse_node(f, &format!("{fp}/{j}")))
            .collect::<Result<Vec<_>>>()?;
            terms.push(Term { weight, factors });
        }
        return Ok(Node::Sum(terms));
    }
    Err(schema(path, "expected one of linear, sparse, const, terms"))
}

fn parse_partition(v: &Value, path: &str) -> Result<Partition> {
    let blocks = arr(v, path)?
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let bp = format!("{path}/{i}");
            arr(b, &bp)?
                .iter()
                .map(|x| {
                    let i = uint_at(x, &bp)? as usize;
                    if i == 0 {
                        return Err(schema(&bp, "variables are numbered from 1"));
                    }
                    Ok(i - 1)
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Partition::new(blocks)
}

fn parse_set_depth(v: &Value) -> Result<SetDepthFormula> {
    let m = obj(v, "")?;
    let root = if let Some(r) = m.get("root") {
        parse_node(r, "/root")?
    } else if m.contains_key("terms") {
        parse_node(v, "")?
    } else {
        return Err(schema("/root", "missing root"));
    };
    let partitions = if let Some(ps) = m.get("partitions") {
        arr(ps, "/partitions")?
            .iter()
            .enumerate()
            .map(|(i, p)| parse_partition(p, &format!("/partitions/{i}")))
            .collect::<Result<Vec<_>>>()?
    } else if let Some(p) = m.get("partition") {
        vec![parse_partition(p, "/partition")?]
    } else {
        Vec::new()
    };
    let inferred_n = partitions
        .iter()
        .flat_map(|p| p.blocks().iter().flatten())
        .copied()
        .chain(root.vars())
        .max()
        .map_or(0, |v| v + 1);
    let n = match m.get("n") {
        Some(x) => uint_at(x, "/n")? as usize,
        None => inferred_n,
    };
    let depth = m
        .get("depth")
        .map(|x| uint_at(x, "/depth"))
        .transpose()?
        .map(|d| d as usize);
    let f = SetDepthFormula::new(n, depth, partitions, root)?;
    if let Some(k) = m.get("k") {
        let k = uint_at(k, "/k")? as usize;
        if f.params().k > k {
            return Err(schema(
                "/k",
                format!("a sum gate has fanin above the declared k = {k}"),
            ));
        }
    }
    Ok(f)
}

fn parse_diagonal(v: &Value) -> Result<DiagonalCircuit> {
    let m = obj(v, "")?;
    let power = uint_at(
        m.get("power").ok_or_else(|| schema("/power", "missing"))?,
        "/power",
    )? as u32;
    let forms_v = arr(
        m.get("forms").ok_or_else(|| schema("/forms", "missing"))?,
        "/forms",
    )?;
    let mut weights = Vec::new();
    let mut polys = Vec::new();
    for (i, f) in forms_v.iter().enumerate() {
        let fp = format!("/forms/{i}");
        let fo = obj(f, &fp)?;
        weights.push(match fo.get("weight") {
            Some(w) => scalar_at(w, &format!("{fp}/weight"))?,
            None => Fp::one(),
        });
        let lin = fo
            .get("linear")
            .ok_or_else(|| schema(&fp, "missing linear"))?;
        polys.push(parse_linear(
            obj(lin, &format!("{fp}/linear"))?,
            &format!("{fp}/linear"),
        )?);
    }
    let inferred = polys.iter().map(|p| p.num_vars()).max().unwrap_or(0);
    let n = match m.get("n") {
        Some(x) => uint_at(x, "/n")? as usize,
        None => inferred,
    };
    if inferred > n {
        return Err(schema("/n", "a form uses a variable beyond n"));
    }
    let forms = polys
        .iter()
        .map(|p| {
            (
                p.coeff(&Exponent::zero()),
                (0..n).map(|j| p.coeff(&Exponent::unit(j))).collect(),
            )
        })
        .collect();
    Ok(DiagonalCircuit {
        n,
        power,
        weights,
        forms,
    })
}

fn parse_dual(v: &Value) -> Result<DualRepresentation> {
    let m = obj(v, "")?;
    let ps = arr(
        m.get("products")
            .ok_or_else(|| schema("/products", "missing"))?,
        "/products",
    )?;
    let mut products = Vec::new();
    let mut maxv = 0;
    for (i, p) in ps.iter().enumerate() {
        let pp = format!("/products/{i}");
        let po = obj(p, &pp)?;
        let w = match po.get("weight") {
            Some(w) => scalar_at(w, &format!("{pp}/weight"))?,
            None => Fp::one(),
        };
        let mut fs = Vec::new();
        for (j, f) in arr(
            po.get("factors")
                .ok_or_else(|| schema(&pp, "missing factors"))?,
            &format!("{pp}/factors"),
        )?
        .iter()
        .enumerate()
        {
            let fp = format!("{pp}/factors/{j}");
            let fo = obj(f, &fp)?;
            let var = uint_at(
                fo.get("var").ok_or_else(|| schema(&fp, "missing var"))?,
                &format!("{fp}/var"),
            )? as usize;
            if var == 0 {
                return Err(schema(
                    &format!("{fp}/var"),
                    "variables are numbered from 1",
                ));
            }
            let cs = arr(
                fo.get("coeffs")
                    .ok_or_else(|| schema(&fp, "missing coeffs"))?,
                &format!("{fp}/coeffs"),
            )?
            .iter()
            .enumerate()
            .map(|(c, x)| scalar_at(x, &format!("{fp}/coeffs/{c}")))
            .collect::<Result<Vec<_>>>()?;
            maxv = maxv.max(var);
            fs.push((var - 1, UniPoly::new(cs)));
        }
        products.push((w, fs));
    }
    let n = match m.get("n") {
        Some(x) => uint_at(x, "/n")? as usize,
        None => maxv,
    };
    DualRepresentation::new(n, products)
}

/// Parse any circuit document.
pub fn parse(v: &Value) -> Result<Circuit> {
    check_version(v)?;
    let kind = v
        .get("kind")
        .and_then(|k| k.as_str())
        .unwrap_or("set_depth");
    match kind {
        "set_depth" => Ok(Circuit::SetDepth(parse_set_depth(v)?)),
        "diagonal" => Ok(Circuit::Diagonal(parse_diagonal(v)?)),
        "dual" => Ok(Circuit::Dual(parse_dual(v)?)),
        other => Err(schema("/kind", format!("unknown kind {other:?}"))),
    }
}

pub fn parse_str(s: &str) -> Result<Circuit> {
    let v: Value = serde_json::from_str(s).map_err(|e| schema("", e.to_string()))?;
    parse(&v)
}

/// Parse a class-parameter document (`version` optional here).
pub fn parse_params(v: &Value) -> Result<ClassParams> {
    if v.get("version").is_some() {
        check_version(v)?;
    }
    let p: ClassParams =
        serde_json::from_value(v.clone()).map_err(|e| schema("", e.to_string()))?;
    p.validate()?;
    Ok(p)
}

fn linear_json(p: &MPoly<Fp>) -> Value {
    let mut m = Map::new();
    for (e, c) in p.terms() {
        let key = match e.support().first() {
            None => "0".to_string(),
            Some(i) => (i + 1).to_string(),
        };
        m.insert(key, json!(c));
    }
    Value::Object(m)
}

fn leaf_json(p: &MPoly<Fp>) -> Value {
    if p.total_degree() <= 1 {
        return json!({ "linear": linear_json(p) });
    }
    let terms: Vec<Value> = p
        .terms()
        .iter()
        .map(|(e, c)| {
            let mut ex = Map::new();
            for i in e.support() {
                ex.insert((i + 1).to_string(), json!(e.get(i)));
            }
            json!({"coef": c, "exp": ex})
        })
        .collect();
    json!({ "sparse": terms })
}

fn node_json(n: &Node) -> Value {
    match n {
        Node::Leaf(p) => leaf_json(p),
        Node::Sum(ts) => {
            let terms: Vec<Value> = ts
                .iter()
                .map(|t| json!({"weight": t.weight, "factors": t.factors.iter().map(node_json).collect::<Vec<_>>()}))
                .collect();
            json!({ "terms": terms })
        }
    }
}

fn partition_json(p: &Partition) -> Value {
    json!(p
        .blocks()
        .iter()
        .map(|b| b.iter().map(|v| v + 1).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

/// Canonical JSON: fixed key order, residues for coefficients, explicit n,
/// depth and weights.
pub fn serialize(c: &Circuit) -> Value {
    match c {
        Circuit::SetDepth(f) => json!({
            "version": FORMAT_VERSION,
            "kind": "set_depth",
            "n": f.n,
            "depth": f.depth,
            "partitions": f.partitions.iter().map(partition_json).collect::<Vec<_>>(),
            "root": node_json(&f.root),
        }),
        Circuit::Diagonal(d) => json!({
            "version": FORMAT_VERSION,
            "kind": "diagonal",
            "n": d.n,
            "power": d.power,
            "forms": (0..d.k()).map(|i| json!({"weight": d.weights[i], "linear": linear_json(&d.form_poly(i))})).collect::<Vec<_>>(),
        }),
        Circuit::Dual(d) => json!({
            "version": FORMAT_VERSION,
            "kind": "dual",
            "n": d.n,
            "products": d.products.iter().map(|(w, fs)| json!({
                "weight": w,
                "factors": fs.iter().map(|(v, g)| json!({"var": v + 1, "coeffs": g.coeffs()})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }),
    }
}

pub fn to_string(c: &Circuit) -> String {
    serde_json::to_string(&serialize(c)).expect("serializing a JSON value cannot fail")
}
