//! Instance files, caps layering and lossless JSON.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Number, Value};

use sa2_core::algebra::{SA2Element, SL2};
use sa2_core::pipeline::Instance;
use sa2_core::witness::PowerWord;
use sa2_core::Caps;

/// Environment variable holding a default caps object.
pub const CAPS_ENV: &str = "SA2_DECIDE_CAPS";

/// Largest magnitude written as a JSON number.
pub const MAX_SAFE: u64 = 1 << 53;

#[derive(Debug)]
pub struct CliError(pub String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn fail<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError(msg.into()))
}

/// A parsed instance file.
#[derive(Clone, Debug)]
pub struct InstanceFile {
    pub instance: Instance,
    pub caps: Option<Map<String, Value>>,
}

pub fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError(format!("{}: malformed JSON: {e}", path.display())))
}

pub fn load_instance(path: &Path) -> CliResult<InstanceFile> {
    parse_instance(&read_json(path)?)
}

fn integer(v: &Value, what: &str) -> CliResult<BigInt> {
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(x), _) => Ok(BigInt::from(x)),
            (_, Some(x)) => Ok(BigInt::from(x)),
            _ => fail(format!("{what}: {n} is not an integer")),
        },
        Value::String(s) => s.trim().parse().map_err(|_| CliError(format!("{what}: {s:?} is not an integer"))),
        other => fail(format!("{what}: expected an integer, found {other}")),
    }
}

fn integers<const N: usize>(v: &Value, what: &str) -> CliResult<[BigInt; N]> {
    let xs = v.as_array().filter(|a| a.len() == N).ok_or_else(|| CliError(format!("{what}: expected {N} entries")))?;
    let parsed: Vec<BigInt> = xs.iter().map(|x| integer(x, what)).collect::<CliResult<_>>()?;
    Ok(parsed.try_into().expect("length checked"))
}

pub fn parse_instance(doc: &Value) -> CliResult<InstanceFile> {
    let obj = doc.as_object().ok_or_else(|| CliError("instance must be a JSON object".into()))?;
    let gens = obj
        .get("generators")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError("missing \"generators\" array".into()))?;
    let mut out = Vec::with_capacity(gens.len());
    for (i, g) in gens.iter().enumerate() {
        let what = format!("generator {}", i + 1);
        let m = g.get("A").ok_or_else(|| CliError(format!("{what}: missing \"A\"")))?;
        let rows = m.as_array().filter(|r| r.len() == 2).ok_or_else(|| CliError(format!("{what}: \"A\" must have two rows")))?;
        let [a, b] = integers::<2>(&rows[0], &what)?;
        let [c, d] = integers::<2>(&rows[1], &what)?;
        let matrix = SL2::new(a, b, c, d).map_err(|e| CliError(format!("{what}: {e}")))?;
        let t = match g.get("a") {
            Some(t) => integers::<2>(t, &what)?,
            None => return fail(format!("{what}: missing \"a\"")),
        };
        out.push(SA2Element::new(matrix, t));
    }
    let instance = Instance::new(out).map_err(|e| CliError(e.to_string()))?;
    let caps = match obj.get("caps") {
        None | Some(Value::Null) => None,
        Some(Value::Object(m)) => Some(m.clone()),
        Some(_) => return fail("\"caps\" must be an object"),
    };
    Ok(InstanceFile { instance, caps })
}

/// Integer as a JSON number, or a decimal string beyond 2⁵³.
pub fn int_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) if v.unsigned_abs() <= MAX_SAFE => Value::from(v),
        _ => Value::String(x.to_string()),
    }
}

pub fn instance_json(inst: &Instance) -> Value {
    let gens: Vec<Value> = inst
        .generators()
        .iter()
        .map(|g| {
            let [[a, b], [c, d]] = g.matrix.entries();
            serde_json::json!({
                "A": [[int_value(a), int_value(b)], [int_value(c), int_value(d)]],
                "a": [int_value(&g.translation[0]), int_value(&g.translation[1])],
            })
        })
        .collect();
    serde_json::json!({ "generators": gens })
}

/// Defaults, then `SA2_DECIDE_CAPS`, then the file's caps, then flags.
pub fn layered_caps(
    env: Option<&str>,
    file: Option<&Map<String, Value>>,
    depth: Option<usize>,
    norm: Option<u64>,
) -> CliResult<Caps> {
    let mut merged = match serde_json::to_value(Caps::default()) {
        Ok(Value::Object(m)) => m,
        _ => unreachable!("caps serialize to an object"),
    };
    if let Some(text) = env.filter(|s| !s.trim().is_empty()) {
        let v: Value = serde_json::from_str(text).map_err(|e| CliError(format!("{CAPS_ENV}: malformed JSON: {e}")))?;
        let Value::Object(m) = v else {
            return fail(format!("{CAPS_ENV} must hold a JSON object"));
        };
        merged.extend(m);
    }
    if let Some(m) = file {
        merged.extend(m.clone());
    }
    let mut caps: Caps = from_lossless(Value::Object(merged)).map_err(|e| CliError(format!("invalid caps: {}", e.0)))?;
    if let Some(d) = depth {
        caps.depth = d;
    }
    if let Some(n) = norm {
        caps.norm = n;
    }
    Ok(caps)
}

/// Numbers beyond 2⁵³ become decimal strings.
pub fn lossless(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            let big = n.as_u64().map(|x| x > MAX_SAFE).or_else(|| n.as_i64().map(|x| x.unsigned_abs() > MAX_SAFE));
            if big == Some(true) {
                Value::String(n.to_string())
            } else {
                Value::Number(n)
            }
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(lossless).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, lossless(v))).collect()),
        other => other,
    }
}

/// Inverse of [`lossless`]: integer strings beyond 2⁵³ become numbers again.
pub fn restore(v: Value) -> Value {
    match v {
        Value::String(s) => {
            let n = s
                .parse::<u64>()
                .ok()
                .filter(|&x| x > MAX_SAFE)
                .map(Number::from)
                .or_else(|| s.parse::<i64>().ok().filter(|x| x.unsigned_abs() > MAX_SAFE).map(Number::from));
            n.map_or(Value::String(s), Value::Number)
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(restore).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, restore(v))).collect()),
        other => other,
    }
}

pub fn to_lossless<T: Serialize>(x: &T) -> Value {
    lossless(serde_json::to_value(x).expect("serializable"))
}

pub fn from_lossless<T: DeserializeOwned>(v: Value) -> CliResult<T> {
    serde_json::from_value(restore(v)).map_err(|e| CliError(e.to_string()))
}

pub fn print_lossless<T: Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(&to_lossless(x)).expect("serializable")
}

/// Parses `x` from text written by [`print_lossless`].
pub fn parse_lossless<T: DeserializeOwned>(text: &str) -> CliResult<T> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError(format!("malformed JSON: {e}")))?;
    from_lossless(v)
}

/// A certificate given inline or as a file: either `[[i, e], ...]` or an
/// object carrying a `"certificate"` field.
pub fn load_certificate(arg: &str) -> CliResult<PowerWord> {
    let path = Path::new(arg);
    let v = if path.is_file() {
        read_json(path)?
    } else {
        serde_json::from_str(arg).map_err(|e| CliError(format!("certificate: neither a file nor JSON: {e}")))?
    };
    let v = match v {
        Value::Object(mut m) => m.remove("certificate").ok_or_else(|| CliError("certificate: no \"certificate\" field".into()))?,
        v => v,
    };
    let factors = v.as_array().ok_or_else(|| CliError("certificate must be a list of [index, exponent] pairs".into()))?;
    let mut out = Vec::with_capacity(factors.len());
    for f in factors {
        let [i, e] = integers::<2>(f, "certificate factor")?;
        let i = i.to_usize().ok_or_else(|| CliError(format!("certificate index {i} out of range")))?;
        let e = e.to_u64().ok_or_else(|| CliError(format!("certificate exponent {e} out of range")))?;
        out.push((i, e));
    }
    PowerWord::new(out).map_err(|e| CliError(e.to_string()))
}
