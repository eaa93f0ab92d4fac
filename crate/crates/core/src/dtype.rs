//! Element type descriptors.
//!
//! A [`DType`] is either one of the supported scalar types or a packed
//! structured record whose fields are themselves dtypes. Scalars are
//! exchanged with other libraries through the three-character typestr
//! encoding (`<f8`, `|u1`, ...).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    SignedInt,
    UnsignedInt,
    Float,
    Bool,
    Structured,
}

impl Kind {
    fn code(self) -> Option<char> {
        match self {
            Kind::SignedInt => Some('i'),
            Kind::UnsignedInt => Some('u'),
            Kind::Float => Some('f'),
            Kind::Bool => Some('b'),
            Kind::Structured => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ByteOrder {
    Little,
    Big,
    NotApplicable,
}

/// The scalar element types kernels know how to compute with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalarType {
    Bool,
    Int8,
    Int16,
    Int32,
    Int64,
    UInt8,
    UInt16,
    UInt32,
    UInt64,
    Float32,
    Float64,
}

impl ScalarType {
    pub const ALL: [ScalarType; 11] = [
        ScalarType::Bool,
        ScalarType::Int8,
        ScalarType::Int16,
        ScalarType::Int32,
        ScalarType::Int64,
        ScalarType::UInt8,
        ScalarType::UInt16,
        ScalarType::UInt32,
        ScalarType::UInt64,
        ScalarType::Float32,
        ScalarType::Float64,
    ];

    pub const fn itemsize(self) -> usize {
        match self {
            ScalarType::Bool | ScalarType::Int8 | ScalarType::UInt8 => 1,
            ScalarType::Int16 | ScalarType::UInt16 => 2,
            ScalarType::Int32 | ScalarType::UInt32 | ScalarType::Float32 => 4,
            ScalarType::Int64 | ScalarType::UInt64 | ScalarType::Float64 => 8,
        }
    }

    pub const fn kind(self) -> Kind {
        match self {
            ScalarType::Bool => Kind::Bool,
            ScalarType::Int8 | ScalarType::Int16 | ScalarType::Int32 | ScalarType::Int64 => {
                Kind::SignedInt
            }
            ScalarType::UInt8 | ScalarType::UInt16 | ScalarType::UInt32 | ScalarType::UInt64 => {
                Kind::UnsignedInt
            }
            ScalarType::Float32 | ScalarType::Float64 => Kind::Float,
        }
    }

    pub fn from_kind_size(kind: Kind, itemsize: usize) -> Option<ScalarType> {
        use ScalarType::*;
        Some(match (kind, itemsize) {
            (Kind::Bool, 1) => Bool,
            (Kind::SignedInt, 1) => Int8,
            (Kind::SignedInt, 2) => Int16,
            (Kind::SignedInt, 4) => Int32,
            (Kind::SignedInt, 8) => Int64,
            (Kind::UnsignedInt, 1) => UInt8,
            (Kind::UnsignedInt, 2) => UInt16,
            (Kind::UnsignedInt, 4) => UInt32,
            (Kind::UnsignedInt, 8) => UInt64,
            (Kind::Float, 4) => Float32,
            (Kind::Float, 8) => Float64,
            _ => return None,
        })
    }

    pub fn is_integer(self) -> bool {
        matches!(self.kind(), Kind::SignedInt | Kind::UnsignedInt)
    }

    pub fn is_float(self) -> bool {
        self.kind() == Kind::Float
    }

    pub fn name(self) -> &'static str {
        match self {
            ScalarType::Bool => "bool",
            ScalarType::Int8 => "int8",
            ScalarType::Int16 => "int16",
            ScalarType::Int32 => "int32",
            ScalarType::Int64 => "int64",
            ScalarType::UInt8 => "uint8",
            ScalarType::UInt16 => "uint16",
            ScalarType::UInt32 => "uint32",
            ScalarType::UInt64 => "uint64",
            ScalarType::Float32 => "float32",
            ScalarType::Float64 => "float64",
        }
    }
}

/// A named member of a structured dtype.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    pub name: String,
    pub dtype: DType,
    pub offset: usize,
}

/// Element descriptor shared by every array. Cheap to clone.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DType {
    kind: Kind,
    itemsize: usize,
    byteorder: ByteOrder,
    fields: Arc<[Field]>,
}

impl DType {
    pub fn scalar(ty: ScalarType) -> DType {
        let itemsize = ty.itemsize();
        let byteorder = if itemsize == 1 || ty == ScalarType::Bool {
            ByteOrder::NotApplicable
        } else {
            ByteOrder::Little
        };
        DType {
            kind: ty.kind(),
            itemsize,
            byteorder,
            fields: Arc::from(Vec::new()),
        }
    }

    pub fn bool() -> DType {
        DType::scalar(ScalarType::Bool)
    }

    /// The default integer type (8-byte signed).
    pub fn int64() -> DType {
        DType::scalar(ScalarType::Int64)
    }

    pub fn uint8() -> DType {
        DType::scalar(ScalarType::UInt8)
    }

    pub fn uint64() -> DType {
        DType::scalar(ScalarType::UInt64)
    }

    pub fn float64() -> DType {
        DType::scalar(ScalarType::Float64)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn itemsize(&self) -> usize {
        self.itemsize
    }

    pub fn byteorder(&self) -> ByteOrder {
        self.byteorder
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn is_structured(&self) -> bool {
        self.kind == Kind::Structured
    }

    /// The computational type, if this is a scalar dtype.
    pub fn scalar_type(&self) -> Option<ScalarType> {
        ScalarType::from_kind_size(self.kind, self.itemsize)
    }

    /// Fails for dtypes whose bytes would need swapping before use.
    pub fn ensure_native(&self) -> Result<()> {
        if self.byteorder == ByteOrder::Big {
            return Err(Error::UnsupportedByteOrder(self.to_string()));
        }
        self.fields.iter().try_for_each(|f| f.dtype.ensure_native())
    }

    /// Offset and dtype of a named field.
    pub fn field(&self, name: &str) -> Result<(usize, &DType)> {
        if !self.is_structured() {
            return Err(Error::NotStructured(self.to_string()));
        }
        self.fields
            .iter()
            .find(|f| f.name == name)
            .map(|f| (f.offset, &f.dtype))
            .ok_or_else(|| Error::FieldNotFound {
                name: name.to_string(),
                available: self.fields.iter().map(|f| f.name.clone()).collect(),
            })
    }
}

impl From<ScalarType> for DType {
    fn from(ty: ScalarType) -> Self {
        DType::scalar(ty)
    }
}

impl fmt::Display for DType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(ty) = self.scalar_type() {
            if self.byteorder == ByteOrder::Big {
                return write!(f, ">{}", ty.name());
            }
            return f.write_str(ty.name());
        }
        f.write_str("[")?;
        for (i, field) in self.fields.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "('{}', {})", field.name, field.dtype)?;
        }
        f.write_str("]")
    }
}

/// One entry of a structured dtype description: either a ready dtype or a
/// nested list of named members.
#[derive(Clone, Debug)]
pub enum FieldSpec {
    Type(DType),
    Nested(Vec<(String, FieldSpec)>),
}

impl From<DType> for FieldSpec {
    fn from(dt: DType) -> Self {
        FieldSpec::Type(dt)
    }
}

impl From<ScalarType> for FieldSpec {
    fn from(ty: ScalarType) -> Self {
        FieldSpec::Type(DType::scalar(ty))
    }
}

impl From<Vec<(String, FieldSpec)>> for FieldSpec {
    fn from(spec: Vec<(String, FieldSpec)>) -> Self {
        FieldSpec::Nested(spec)
    }
}

/// Builds a packed structured dtype: every field starts where the previous
/// one ended and there is no trailing padding.
pub fn make_struct_dtype(spec: &[(String, FieldSpec)]) -> Result<DType> {
    if spec.is_empty() {
        return Err(Error::EmptyStruct);
    }
    let mut fields: Vec<Field> = Vec::with_capacity(spec.len());
    let mut offset = 0usize;
    for (name, member) in spec {
        if name.is_empty() {
            return Err(Error::EmptyFieldName);
        }
        if fields.iter().any(|f| &f.name == name) {
            return Err(Error::DuplicateField(name.clone()));
        }
        let dtype = match member {
            FieldSpec::Type(dt) => dt.clone(),
            FieldSpec::Nested(inner) => make_struct_dtype(inner)?,
        };
        let size = dtype.itemsize;
        fields.push(Field {
            name: name.clone(),
            dtype,
            offset,
        });
        offset += size;
    }
    let byteorder = if offset == 1 {
        ByteOrder::NotApplicable
    } else {
        ByteOrder::Little
    };
    Ok(DType {
        kind: Kind::Structured,
        itemsize: offset,
        byteorder,
        fields: Arc::from(fields),
    })
}

/// Convenience wrapper over [`make_struct_dtype`] for string-literal names.
pub fn struct_dtype<S: Into<String>>(
    spec: impl IntoIterator<Item = (S, FieldSpec)>,
) -> Result<DType> {
    let spec: Vec<(String, FieldSpec)> = spec.into_iter().map(|(n, s)| (n.into(), s)).collect();
    make_struct_dtype(&spec)
}

pub fn field_lookup<'a>(dt: &'a DType, name: &str) -> Result<(usize, &'a DType)> {
    dt.field(name)
}

/// Parses a typestr, rejecting big-endian multi-byte types.
pub fn parse_typestr(s: &str) -> Result<DType> {
    let dt = parse_typestr_any_order(s)?;
    if dt.byteorder == ByteOrder::Big {
        return Err(Error::UnsupportedByteOrder(s.to_string()));
    }
    Ok(dt)
}

/// Parses a typestr including big-endian ones. Arrays cannot be built over
/// the resulting dtype; it exists so descriptors can be inspected.
pub fn parse_typestr_any_order(s: &str) -> Result<DType> {
    let err = |position: usize, reason: String| Error::TypestrParse {
        input: s.to_string(),
        position,
        reason,
    };
    let mut chars = s.chars();
    let order = match chars.next() {
        Some(c @ ('<' | '>' | '|')) => c,
        Some(c) => return Err(err(0, format!("invalid byte order character {c:?}"))),
        None => return Err(err(0, "empty string".into())),
    };
    let kind = match chars.next() {
        Some('i') => Kind::SignedInt,
        Some('u') => Kind::UnsignedInt,
        Some('f') => Kind::Float,
        Some('b') => Kind::Bool,
        Some(c) => return Err(err(1, format!("invalid kind character {c:?}"))),
        None => return Err(err(1, "missing kind character".into())),
    };
    let digits = &s[2..];
    if digits.is_empty() {
        return Err(err(2, "missing item size".into()));
    }
    if let Some((i, c)) = digits.char_indices().find(|(_, c)| !c.is_ascii_digit()) {
        return Err(err(2 + i, format!("invalid size character {c:?}")));
    }
    if digits.starts_with('0') {
        return Err(err(2, "item size must be a positive integer without leading zeros".into()));
    }
    let itemsize: usize = digits
        .parse()
        .map_err(|_| err(2, "item size out of range".into()))?;
    let ty = ScalarType::from_kind_size(kind, itemsize)
        .ok_or_else(|| Error::UnsupportedDType(s.to_string()))?;

    let single = itemsize == 1 || kind == Kind::Bool;
    match (order, single) {
        ('|', true) => Ok(DType::scalar(ty)),
        ('<', false) => Ok(DType::scalar(ty)),
        ('>', false) => Ok(DType {
            byteorder: ByteOrder::Big,
            ..DType::scalar(ty)
        }),
        ('|', false) => Err(err(0, format!("byte order '|' is not valid for {itemsize}-byte type"))),
        (c, _) => Err(err(0, format!("byte order {c:?} is not valid for a single-byte type"))),
    }
}

pub fn format_typestr(dt: &DType) -> Result<String> {
    let code = dt
        .kind
        .code()
        .ok_or_else(|| Error::NotRepresentable(dt.to_string()))?;
    let order = match dt.byteorder {
        ByteOrder::Little => '<',
        ByteOrder::Big => '>',
        ByteOrder::NotApplicable => '|',
    };
    Ok(format!("{order}{code}{}", dt.itemsize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record_dtype() -> DType {
        struct_dtype([
            ("time", FieldSpec::from(ScalarType::UInt64)),
            (
                "pos",
                FieldSpec::Nested(vec![
                    ("x".into(), ScalarType::Float64.into()),
                    ("y".into(), ScalarType::Float64.into()),
                ]),
            ),
        ])
        .unwrap()
    }

    #[test]
    fn parses_single_byte_unsigned() {
        let dt = parse_typestr("|u1").unwrap();
        assert_eq!(dt.kind(), Kind::UnsignedInt);
        assert_eq!(dt.itemsize(), 1);
        assert_eq!(dt.byteorder(), ByteOrder::NotApplicable);
    }

    #[test]
    fn parses_little_endian_int() {
        let dt = parse_typestr("<i8").unwrap();
        assert_eq!(dt, DType::int64());
        assert_eq!(dt.byteorder(), ByteOrder::Little);
    }

    #[test]
    fn rejects_bad_order_character() {
        match parse_typestr("x4") {
            Err(Error::TypestrParse { position, reason, .. }) => {
                assert_eq!(position, 0);
                assert!(reason.contains("'x'"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_sizes() {
        for s in ["<i", "<i0", "<i08", "<ix", "<f2", "|b2", "", "<", "<c8"] {
            assert!(parse_typestr(s).is_err(), "{s}");
        }
    }

    #[test]
    fn big_endian_is_parsed_only_on_request() {
        assert!(matches!(
            parse_typestr(">f8"),
            Err(Error::UnsupportedByteOrder(_))
        ));
        let dt = parse_typestr_any_order(">f8").unwrap();
        assert_eq!(dt.byteorder(), ByteOrder::Big);
        assert_eq!(format_typestr(&dt).unwrap(), ">f8");
        assert!(dt.ensure_native().is_err());
    }

    #[test]
    fn formats_scalars() {
        assert_eq!(format_typestr(&DType::uint8()).unwrap(), "|u1");
        assert_eq!(format_typestr(&DType::float64()).unwrap(), "<f8");
        assert_eq!(format_typestr(&DType::bool()).unwrap(), "|b1");
        assert!(matches!(
            format_typestr(&record_dtype()),
            Err(Error::NotRepresentable(_))
        ));
    }

    #[test]
    fn nested_record_layout_is_packed() {
        let dt = record_dtype();
        assert_eq!(dt.itemsize(), 24);
        let (off, time) = field_lookup(&dt, "time").unwrap();
        assert_eq!((off, time), (0, &DType::uint64()));
        let (off, pos) = field_lookup(&dt, "pos").unwrap();
        assert_eq!(off, 8);
        assert!(pos.is_structured());
        assert_eq!(pos.field("x").unwrap().0, 0);
        assert_eq!(pos.field("y").unwrap().0, 8);
    }

    #[test]
    fn single_field_record() {
        let dt = struct_dtype([("a", FieldSpec::from(ScalarType::UInt8))]).unwrap();
        assert_eq!(dt.itemsize(), 1);
        assert!(dt.is_structured());
    }

    #[test]
    fn struct_errors() {
        assert!(matches!(
            struct_dtype([
                ("a", FieldSpec::from(ScalarType::UInt8)),
                ("a", FieldSpec::from(ScalarType::Float64)),
            ]),
            Err(Error::DuplicateField(n)) if n == "a"
        ));
        assert!(matches!(
            make_struct_dtype(&[]),
            Err(Error::EmptyStruct)
        ));
        assert!(matches!(
            struct_dtype([("", FieldSpec::from(ScalarType::UInt8))]),
            Err(Error::EmptyFieldName)
        ));
    }

    #[test]
    fn unknown_field_lists_names() {
        let err = field_lookup(&record_dtype(), "z").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("time") && msg.contains("pos"), "{msg}");
    }

    fn typestr_strategy() -> impl Strategy<Value = String> {
        prop::sample::select(ScalarType::ALL.to_vec()).prop_map(|ty| {
            let dt = DType::scalar(ty);
            let order = if dt.byteorder() == ByteOrder::NotApplicable { '|' } else { '<' };
            let code = dt.kind().code().unwrap();
            format!("{order}{code}{}", ty.itemsize())
        })
    }

    fn leaf_sizes(dt: &DType) -> usize {
        if dt.is_structured() {
            dt.fields().iter().map(|f| leaf_sizes(&f.dtype)).sum()
        } else {
            dt.itemsize()
        }
    }

    fn spec_strategy() -> impl Strategy<Value = Vec<(String, FieldSpec)>> {
        let leaf = prop::sample::select(ScalarType::ALL.to_vec()).prop_map(FieldSpec::from);
        let member = leaf.prop_recursive(3, 24, 4, |inner| {
            prop::collection::vec(inner, 1..4).prop_map(|members| {
                FieldSpec::Nested(
                    members
                        .into_iter()
                        .enumerate()
                        .map(|(i, m)| (format!("f{i}"), m))
                        .collect(),
                )
            })
        });
        prop::collection::vec(member, 1..5).prop_map(|members| {
            members
                .into_iter()
                .enumerate()
                .map(|(i, m)| (format!("m{i}"), m))
                .collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn typestr_round_trips(s in typestr_strategy()) {
            let dt = parse_typestr(&s).unwrap();
            prop_assert_eq!(format_typestr(&dt).unwrap(), s);
        }

        #[test]
        fn arbitrary_strings_never_panic(s in "[<>|x]?[iufbc]?[0-9]{0,3}") {
            let _ = parse_typestr(&s);
        }

        #[test]
        fn struct_itemsize_is_sum_of_leaves(spec in spec_strategy()) {
            let dt = make_struct_dtype(&spec).unwrap();
            prop_assert_eq!(dt.itemsize(), leaf_sizes(&dt));
            let offsets: Vec<usize> = dt.fields().iter().map(|f| f.offset).collect();
            prop_assert!(offsets.windows(2).all(|w| w[0] < w[1]));
            let mut expected = 0;
            for f in dt.fields() {
                prop_assert_eq!(f.offset, expected);
                expected += f.dtype.itemsize();
            }
        }
    }
}
