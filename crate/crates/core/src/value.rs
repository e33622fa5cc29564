//! Scalar-or-tuple value algebra. Tuples are flat: every element is a
//! scalar, so a tuple type is fully described by its component kinds.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScalarType {
    Int,
    Bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValueType {
    IntT,
    BoolT,
    /// Non-empty, scalars only (no nesting).
    TupleT(Vec<ScalarType>),
}

impl ValueType {
    /// Scalar components in order; a scalar type is its own single component.
    pub fn components(&self) -> Vec<ScalarType> {
        match self {
            ValueType::IntT => vec![ScalarType::Int],
            ValueType::BoolT => vec![ScalarType::Bool],
            ValueType::TupleT(elems) => elems.clone(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            ValueType::TupleT(elems) => elems.len(),
            _ => 1,
        }
    }

    pub fn is_tuple(&self) -> bool {
        matches!(self, ValueType::TupleT(_))
    }

    pub fn check(&self) -> Result<(), String> {
        match self {
            ValueType::TupleT(elems) if elems.is_empty() => {
                Err("tuple type must have at least one element".to_string())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueType::IntT => write!(f, "int"),
            ValueType::BoolT => write!(f, "bool"),
            ValueType::TupleT(elems) => {
                write!(f, "(tuple")?;
                for e in elems {
                    match e {
                        ScalarType::Int => write!(f, " int")?,
                        ScalarType::Bool => write!(f, " bool")?,
                    }
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scalar {
    Int(i64),
    Bool(bool),
}

impl Scalar {
    pub fn scalar_type(&self) -> ScalarType {
        match self {
            Scalar::Int(_) => ScalarType::Int,
            Scalar::Bool(_) => ScalarType::Bool,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Scalar::Int(n) => Some(*n),
            Scalar::Bool(_) => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Scalar::Bool(b) => Some(*b),
            Scalar::Int(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(n) => write!(f, "{n}"),
            Scalar::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    IntV(i64),
    BoolV(bool),
    TupleV(Vec<Scalar>),
}

impl Value {
    pub fn int(n: i64) -> Value {
        Value::IntV(n)
    }

    pub fn bool(b: bool) -> Value {
        Value::BoolV(b)
    }

    pub fn tuple(items: Vec<Scalar>) -> Value {
        Value::TupleV(items)
    }

    /// Scalar components in order; scalars are their own single component.
    pub fn components(&self) -> Vec<Scalar> {
        match self {
            Value::IntV(n) => vec![Scalar::Int(*n)],
            Value::BoolV(b) => vec![Scalar::Bool(*b)],
            Value::TupleV(items) => items.clone(),
        }
    }

    pub fn component(&self, i: usize) -> Option<Scalar> {
        match self {
            Value::IntV(n) if i == 0 => Some(Scalar::Int(*n)),
            Value::BoolV(b) if i == 0 => Some(Scalar::Bool(*b)),
            Value::TupleV(items) => items.get(i).copied(),
            _ => None,
        }
    }

    /// Rebuilds a value of type `ty` from scalar components.
    pub fn from_components(ty: &ValueType, comps: &[Scalar]) -> Result<Value, String> {
        let want = ty.components();
        if comps.len() != want.len() {
            return Err(format!("expected {} components, got {}", want.len(), comps.len()));
        }
        for (c, w) in comps.iter().zip(&want) {
            if c.scalar_type() != *w {
                return Err(format!("component kind mismatch in {ty}"));
            }
        }
        match ty {
            ValueType::IntT => Ok(Value::IntV(comps[0].as_int().unwrap())),
            ValueType::BoolT => Ok(Value::BoolV(comps[0].as_bool().unwrap())),
            ValueType::TupleT(_) => Ok(Value::TupleV(comps.to_vec())),
        }
    }

    pub fn matches_type(&self, ty: &ValueType) -> bool {
        match (self, ty) {
            (Value::IntV(_), ValueType::IntT) => true,
            (Value::BoolV(_), ValueType::BoolT) => true,
            (Value::TupleV(items), ValueType::TupleT(elems)) => {
                items.len() == elems.len()
                    && items.iter().zip(elems).all(|(v, t)| v.scalar_type() == *t)
            }
            _ => false,
        }
    }

    /// JSON rendering used by the CLI: ints and bools as themselves, tuples
    /// as arrays of scalars.
    pub fn to_json(&self) -> serde_json::Value {
        fn scalar(s: &Scalar) -> serde_json::Value {
            match s {
                Scalar::Int(n) => serde_json::Value::from(*n),
                Scalar::Bool(b) => serde_json::Value::from(*b),
            }
        }
        match self {
            Value::IntV(n) => serde_json::Value::from(*n),
            Value::BoolV(b) => serde_json::Value::from(*b),
            Value::TupleV(items) => serde_json::Value::Array(items.iter().map(scalar).collect()),
        }
    }

    pub fn from_json(json: &serde_json::Value) -> Result<Value, String> {
        fn scalar(json: &serde_json::Value) -> Result<Scalar, String> {
            if let Some(b) = json.as_bool() {
                Ok(Scalar::Bool(b))
            } else if let Some(n) = json.as_i64() {
                Ok(Scalar::Int(n))
            } else {
                Err(format!("expected integer or boolean, got {json}"))
            }
        }
        match json {
            serde_json::Value::Array(items) => {
                let comps = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
                if comps.is_empty() {
                    return Err("tuple value must be non-empty".to_string());
                }
                Ok(Value::TupleV(comps))
            }
            other => Ok(match scalar(other)? {
                Scalar::Int(n) => Value::IntV(n),
                Scalar::Bool(b) => Value::BoolV(b),
            }),
        }
    }
}

/// Display matches the JSON rendering so fuzz output and error messages
/// agree on one spelling.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_components_round_trip() {
        let ty = ValueType::TupleT(vec![ScalarType::Int, ScalarType::Bool]);
        let v = Value::TupleV(vec![Scalar::Int(3), Scalar::Bool(true)]);
        assert!(v.matches_type(&ty));
        let back = Value::from_components(&ty, &v.components()).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn scalar_component_zero() {
        assert_eq!(Value::IntV(7).component(0), Some(Scalar::Int(7)));
        assert_eq!(Value::IntV(7).component(1), None);
    }

    #[test]
    fn json_round_trip() {
        for v in [
            Value::IntV(-4),
            Value::BoolV(true),
            Value::TupleV(vec![Scalar::Int(1), Scalar::Int(2)]),
        ] {
            assert_eq!(Value::from_json(&v.to_json()).unwrap(), v);
        }
    }

    #[test]
    fn empty_tuple_type_rejected() {
        assert!(ValueType::TupleT(vec![]).check().is_err());
    }
}
