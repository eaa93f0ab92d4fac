use crate::dtype::{Kind, ScalarType};

fn signed_of_size(size: usize) -> Option<ScalarType> {
    ScalarType::from_kind_size(Kind::SignedInt, size)
}

/// Result type of a binary operation on two scalar types.
///
/// bool sits below every integer; integers of one signedness widen to the
/// larger width; an unsigned and a signed integer meet at the smallest
/// signed type wider than the unsigned one (float64 when none exists); any
/// integer combined with a float yields float64, and two floats yield the
/// wider one.
pub fn promote(a: ScalarType, b: ScalarType) -> ScalarType {
    use Kind::*;
    if a == b {
        return a;
    }
    let wider = |x: ScalarType, y: ScalarType| if x.itemsize() >= y.itemsize() { x } else { y };
    match (a.kind(), b.kind()) {
        (Bool, _) => b,
        (_, Bool) => a,
        (Float, Float) => wider(a, b),
        (Float, _) | (_, Float) => ScalarType::Float64,
        (SignedInt, SignedInt) | (UnsignedInt, UnsignedInt) => wider(a, b),
        (SignedInt, UnsignedInt) | (UnsignedInt, SignedInt) => {
            let (s, u) = if a.kind() == SignedInt { (a, b) } else { (b, a) };
            if s.itemsize() > u.itemsize() {
                s
            } else {
                signed_of_size(u.itemsize() * 2).unwrap_or(ScalarType::Float64)
            }
        }
        (Structured, _) | (_, Structured) => unreachable!("scalar types are never structured"),
    }
}

/// Whether a `from` result may be stored into a `to` array in place:
/// same kind at any width, or a strictly lower kind (bool < unsigned <
/// signed < float).
pub fn can_store(from: ScalarType, to: ScalarType) -> bool {
    let rank = |t: ScalarType| match t.kind() {
        Kind::Bool => 0,
        Kind::UnsignedInt => 1,
        Kind::SignedInt => 2,
        Kind::Float => 3,
        Kind::Structured => 4,
    };
    rank(from) <= rank(to)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ScalarType::*;

    #[test]
    fn ladder_examples() {
        assert_eq!(promote(Int64, Int64), Int64);
        assert_eq!(promote(Bool, Int8), Int8);
        assert_eq!(promote(Int8, Int32), Int32);
        assert_eq!(promote(UInt8, Int8), Int16);
        assert_eq!(promote(UInt32, Int16), Int64);
        assert_eq!(promote(UInt32, Int64), Int64);
        assert_eq!(promote(UInt64, Int8), Float64);
        assert_eq!(promote(UInt8, UInt64), UInt64);
        assert_eq!(promote(Int8, Float32), Float64);
        assert_eq!(promote(Float32, Float64), Float64);
        assert_eq!(promote(Bool, Float32), Float32);
    }

    #[test]
    fn ladder_is_symmetric_and_associative() {
        for &a in &ScalarType::ALL {
            for &b in &ScalarType::ALL {
                assert_eq!(promote(a, b), promote(b, a), "{a:?} {b:?}");
                for &c in &ScalarType::ALL {
                    assert_eq!(
                        promote(promote(a, b), c),
                        promote(a, promote(b, c)),
                        "{a:?} {b:?} {c:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn store_rules() {
        assert!(can_store(Int64, Int64));
        assert!(can_store(UInt8, Int64));
        assert!(can_store(Int64, Float32));
        assert!(!can_store(Float64, Int64));
        assert!(!can_store(Int64, UInt8));
    }
}
