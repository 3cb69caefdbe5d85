use std::cmp::Ordering;
use std::fmt;

/// A single cell. Categorical cells hold a dictionary code local to their column;
/// datetimes are stored as seconds since the Unix epoch in `Int`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Code(u32),
    Null,
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }
}

/// Totally ordered coordinate used by the range indexes.
///
/// Integers and floats compare exactly against each other, so a column of `i64`
/// can be compared with a column of `f64` without rounding through `f64`.
/// Floats are never NaN and `-0.0` is normalized away at ingest.
#[derive(Clone, Copy, Debug)]
pub enum Key {
    Int(i64),
    Float(f64),
}

impl Key {
    pub fn from_f64(v: f64) -> Key {
        Key::Float(normalize_float(v))
    }
}

pub(crate) fn normalize_float(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

// 2^63, the first float above every i64.
const TWO_POW_63: f64 = 9_223_372_036_854_775_808.0;

fn cmp_int_float(i: i64, f: f64) -> Ordering {
    if f >= TWO_POW_63 {
        return Ordering::Less;
    }
    if f < -TWO_POW_63 {
        return Ordering::Greater;
    }
    let floor = f.floor();
    match i.cmp(&(floor as i64)) {
        Ordering::Equal if f > floor => Ordering::Less,
        other => other,
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        match (*self, *other) {
            (Key::Int(a), Key::Int(b)) => a.cmp(&b),
            (Key::Float(a), Key::Float(b)) => a.total_cmp(&b),
            (Key::Int(a), Key::Float(b)) => cmp_int_float(a, b),
            (Key::Float(a), Key::Int(b)) => cmp_int_float(b, a).reverse(),
        }
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Key::Int(v) => write!(f, "{v}"),
            Key::Float(v) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_comparisons_are_exact() {
        assert_eq!(Key::Int(3), Key::Float(3.0));
        assert!(Key::Int(3) < Key::Float(3.5));
        assert!(Key::Int(-3) > Key::Float(-3.5));
        assert!(Key::Int(i64::MAX) < Key::Float(TWO_POW_63));
        assert!(Key::Int(i64::MIN) == Key::Float(-TWO_POW_63));
        // 2^53 + 1 is not representable as f64; a lossy cast would call these equal.
        let big = (1i64 << 53) + 1;
        assert!(Key::Int(big) > Key::Float((1i64 << 53) as f64));
        assert!(Key::Float(f64::NEG_INFINITY) < Key::Int(i64::MIN));
    }

    #[test]
    fn negative_zero_normalizes() {
        assert_eq!(Key::from_f64(-0.0), Key::Float(0.0));
        assert_eq!(Key::from_f64(-0.0).cmp(&Key::Int(0)), Ordering::Equal);
    }
}
