//! Six-dimensional loop-nest workloads: layers, models, and dimension utilities.
//!
//! Every layer is a canonical dimension tuple `(K, C, Y, X, R, S)` plus a
//! stride. GEMM operands are embedded into the same tuple at construction
//! time, so the rest of the toolkit only ever deals with one layer shape.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};
use serde::{Deserialize, Serialize};

/// Largest accepted extent for a single loop dimension.
///
/// Keeps divisor enumeration cheap and, together with [`MAX_WORK_PRODUCT`],
/// guarantees that every derived quantity (MACs, footprints, traffic) fits in
/// `u64` without overflow checks sprinkled through the hot paths.
pub const MAX_DIM: u64 = 1 << 20;

/// Upper bound on the product of padded input extents of one layer.
///
/// All cost-model outputs are bounded by a small constant multiple of this
/// product, so enforcing it at validation time makes `u64` arithmetic safe
/// everywhere downstream.
pub const MAX_WORK_PRODUCT: u128 = 1 << 56;

/// The six canonical loop dimensions of a convolution-style layer.
///
/// `K`: output channels, `C`: input channels, `Y`/`X`: output spatial extents,
/// `R`/`S`: filter spatial extents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dim {
    K,
    C,
    Y,
    X,
    R,
    S,
}

impl Dim {
    /// All dimensions in canonical order.
    pub const ALL: [Dim; 6] = [Dim::K, Dim::C, Dim::Y, Dim::X, Dim::R, Dim::S];

    /// Number of canonical dimensions.
    pub const COUNT: usize = 6;

    /// Position of this dimension in canonical order.
    pub fn index(self) -> usize {
        match self {
            Dim::K => 0,
            Dim::C => 1,
            Dim::Y => 2,
            Dim::X => 3,
            Dim::R => 4,
            Dim::S => 5,
        }
    }

    /// Inverse of [`Dim::index`]. Panics if `i >= 6`.
    pub fn from_index(i: usize) -> Dim {
        Dim::ALL[i]
    }

    /// Canonical single-letter name.
    pub fn name(self) -> &'static str {
        match self {
            Dim::K => "K",
            Dim::C => "C",
            Dim::Y => "Y",
            Dim::X => "X",
            Dim::R => "R",
            Dim::S => "S",
        }
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A small set of [`Dim`]s packed into one byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DimSet(u8);

impl DimSet {
    /// The empty set.
    pub const EMPTY: DimSet = DimSet(0);
    /// All six dimensions.
    pub const ALL: DimSet = DimSet(0b11_1111);

    /// Returns whether `d` is a member.
    pub fn contains(self, d: Dim) -> bool {
        self.0 & (1 << d.index()) != 0
    }

    /// Adds `d` to the set.
    pub fn insert(&mut self, d: Dim) {
        self.0 |= 1 << d.index();
    }

    /// Number of members.
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Returns whether the set is empty.
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Members in canonical dimension order.
    pub fn iter(self) -> impl Iterator<Item = Dim> {
        Dim::ALL.into_iter().filter(move |d| self.contains(*d))
    }
}

impl FromIterator<Dim> for DimSet {
    fn from_iter<T: IntoIterator<Item = Dim>>(iter: T) -> Self {
        let mut s = DimSet::EMPTY;
        for d in iter {
            s.insert(d);
        }
        s
    }
}

/// One `u64` per canonical dimension, indexed by [`Dim`].
///
/// Used both for layer extents and for per-dimension tile sizes. Serialized as
/// an object with the six dimension letters as keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "DimValsRepr", into = "DimValsRepr")]
pub struct DimVals(pub [u64; 6]);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DimValsRepr {
    #[serde(rename = "K")]
    k: u64,
    #[serde(rename = "C")]
    c: u64,
    #[serde(rename = "Y")]
    y: u64,
    #[serde(rename = "X")]
    x: u64,
    #[serde(rename = "R")]
    r: u64,
    #[serde(rename = "S")]
    s: u64,
}

impl From<DimValsRepr> for DimVals {
    fn from(v: DimValsRepr) -> Self {
        DimVals([v.k, v.c, v.y, v.x, v.r, v.s])
    }
}

impl From<DimVals> for DimValsRepr {
    fn from(v: DimVals) -> Self {
        DimValsRepr {
            k: v.0[0],
            c: v.0[1],
            y: v.0[2],
            x: v.0[3],
            r: v.0[4],
            s: v.0[5],
        }
    }
}

impl DimVals {
    /// All six values equal to `v`.
    pub fn splat(v: u64) -> DimVals {
        DimVals([v; 6])
    }

    /// Product of all six values, widened to avoid overflow.
    pub fn product(self) -> u128 {
        self.0.iter().map(|&v| v as u128).product()
    }
}

impl Index<Dim> for DimVals {
    type Output = u64;
    fn index(&self, d: Dim) -> &u64 {
        &self.0[d.index()]
    }
}

impl IndexMut<Dim> for DimVals {
    fn index_mut(&mut self, d: Dim) -> &mut u64 {
        &mut self.0[d.index()]
    }
}

/// How a GEMM `(M, N, K)` is assigned to convolution dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GemmEmbedding {
    /// `M -> K`, `K -> C`, `N -> Y`: the GEMM contraction lands on `C`, the
    /// only dimension the cost model reduces over. This is the default.
    Contraction,
    /// `M -> K`, `N -> C`, `K -> Y`: positional assignment of the operand
    /// letters. Kept selectable for cross-checking against tools that use it;
    /// note it turns the contraction into a non-reduced dimension.
    Literal,
}

/// Operator class of a layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerKind {
    /// Dense 2-D convolution (weights `K*C*R*S`).
    #[serde(rename = "CONV2D")]
    Conv2d,
    /// Depthwise 2-D convolution: one filter per channel, `C` must be 1 and
    /// there is no cross-channel reduction.
    #[serde(rename = "DWCONV")]
    DwConv,
    /// GEMM embedded into the convolution dimension tuple.
    #[serde(rename = "GEMM")]
    Gemm(GemmEmbedding),
}

impl LayerKind {
    /// Returns whether this layer reduces over `C`.
    pub fn reduces_over_c(self) -> bool {
        !matches!(self, LayerKind::DwConv)
    }
}

/// One layer: a named loop nest with extents and stride.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LayerRepr", into = "LayerRepr")]
pub struct Layer {
    /// Unique (within a model) layer name.
    pub name: String,
    /// Operator class.
    pub kind: LayerKind,
    /// Extent of each canonical dimension; unused dimensions are 1.
    pub dims: DimVals,
    /// Convolution stride, applied to both spatial axes. 1 for GEMM layers.
    pub stride: u64,
}

impl Layer {
    /// Builds a dense convolution layer.
    pub fn conv2d(name: &str, dims: [u64; 6], stride: u64) -> Layer {
        Layer {
            name: String::from(name),
            kind: LayerKind::Conv2d,
            dims: DimVals(dims),
            stride,
        }
    }

    /// Builds a depthwise convolution layer (`C` is fixed to 1).
    pub fn dwconv(name: &str, k: u64, y: u64, x: u64, r: u64, s: u64, stride: u64) -> Layer {
        Layer {
            name: String::from(name),
            kind: LayerKind::DwConv,
            dims: DimVals([k, 1, y, x, r, s]),
            stride,
        }
    }

    /// Embeds a GEMM `(m, n, k)` into the canonical dimension tuple.
    pub fn gemm(name: &str, m: u64, n: u64, k: u64, embedding: GemmEmbedding) -> Layer {
        let dims = match embedding {
            GemmEmbedding::Contraction => DimVals([m, k, n, 1, 1, 1]),
            GemmEmbedding::Literal => DimVals([m, n, k, 1, 1, 1]),
        };
        Layer {
            name: String::from(name),
            kind: LayerKind::Gemm(embedding),
            dims,
            stride: 1,
        }
    }

    /// Dimensions with extent greater than 1.
    pub fn effective_dims(&self) -> DimSet {
        Dim::ALL.into_iter().filter(|&d| self.dims[d] > 1).collect()
    }

    /// Total multiply-accumulate count of the layer.
    ///
    /// The product over all six extents; for depthwise layers `C == 1`, so the
    /// same product counts the per-channel filter applications.
    pub fn macs(&self) -> u64 {
        // Safe: validation bounds the product (MAX_WORK_PRODUCT < 2^64).
        self.dims.product() as u64
    }

    /// Input extent along `Y` for a full output tile of `t_y` with this
    /// layer's stride and filter height.
    pub fn input_extent_y(&self, t_y: u64) -> u64 {
        (t_y - 1) * self.stride + self.dims[Dim::R]
    }

    /// Input extent along `X` for a full output tile of `t_x`.
    pub fn input_extent_x(&self, t_x: u64) -> u64 {
        (t_x - 1) * self.stride + self.dims[Dim::S]
    }

    /// Checks the layer in isolation. See [`Model::validate`] for the rules.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.name.is_empty() {
            return Err(ModelError::EmptyName);
        }
        for d in Dim::ALL {
            let v = self.dims[d];
            if v == 0 || v > MAX_DIM {
                return Err(ModelError::BadExtent {
                    layer: self.name.clone(),
                    dim: d,
                    value: v,
                });
            }
        }
        if self.stride == 0 || self.stride > MAX_DIM {
            return Err(ModelError::BadStride {
                layer: self.name.clone(),
                value: self.stride,
            });
        }
        if matches!(self.kind, LayerKind::DwConv) && self.dims[Dim::C] != 1 {
            return Err(ModelError::DepthwiseChannels {
                layer: self.name.clone(),
                c: self.dims[Dim::C],
            });
        }
        // Bound the padded-input work product so all downstream arithmetic
        // stays inside u64.
        let padded = self.dims[Dim::K] as u128
            * self.dims[Dim::C] as u128
            * self.input_extent_y(self.dims[Dim::Y]) as u128
            * self.input_extent_x(self.dims[Dim::X]) as u128
            * self.dims[Dim::R] as u128
            * self.dims[Dim::S] as u128;
        if padded > MAX_WORK_PRODUCT {
            return Err(ModelError::TooLarge {
                layer: self.name.clone(),
            });
        }
        Ok(())
    }
}

/// Intermediate serde form of [`Layer`].
///
/// Convolution layers carry the six extents inline; GEMM layers carry
/// `(M, N, K)` plus an optional embedding mode and are embedded on load.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerRepr {
    name: String,
    kind: KindRepr,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    k: Option<u64>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    c: Option<u64>,
    #[serde(rename = "Y", default, skip_serializing_if = "Option::is_none")]
    y: Option<u64>,
    #[serde(rename = "X", default, skip_serializing_if = "Option::is_none")]
    x: Option<u64>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    r: Option<u64>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    s: Option<u64>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    m: Option<u64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stride: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    embedding: Option<GemmEmbedding>,
}

#[derive(Serialize, Deserialize)]
enum KindRepr {
    #[serde(rename = "CONV2D")]
    Conv2d,
    #[serde(rename = "DWCONV")]
    DwConv,
    #[serde(rename = "GEMM")]
    Gemm,
}

impl TryFrom<LayerRepr> for Layer {
    type Error = ModelError;

    fn try_from(r: LayerRepr) -> Result<Layer, ModelError> {
        let conv_fields = [r.k, r.c, r.y, r.x, r.r, r.s];
        match r.kind {
            KindRepr::Gemm => {
                if r.c.is_some()
                    || r.y.is_some()
                    || r.x.is_some()
                    || r.r.is_some()
                    || r.s.is_some()
                    || r.stride.is_some()
                {
                    return Err(ModelError::MixedForm { layer: r.name });
                }
                let (m, n, k) = match (r.m, r.n, r.k) {
                    (Some(m), Some(n), Some(k)) => (m, n, k),
                    _ => return Err(ModelError::IncompleteGemm { layer: r.name }),
                };
                let embedding = r.embedding.unwrap_or(GemmEmbedding::Contraction);
                Ok(Layer::gemm(&r.name, m, n, k, embedding))
            }
            KindRepr::Conv2d | KindRepr::DwConv => {
                if r.m.is_some() || r.n.is_some() || r.embedding.is_some() {
                    return Err(ModelError::MixedForm { layer: r.name });
                }
                if conv_fields.iter().any(Option::is_none) {
                    return Err(ModelError::IncompleteConv { layer: r.name });
                }
                let dims = DimVals(conv_fields.map(Option::unwrap));
                Ok(Layer {
                    name: r.name,
                    kind: match r.kind {
                        KindRepr::Conv2d => LayerKind::Conv2d,
                        _ => LayerKind::DwConv,
                    },
                    dims,
                    stride: r.stride.unwrap_or(1),
                })
            }
        }
    }
}

impl From<Layer> for LayerRepr {
    fn from(l: Layer) -> LayerRepr {
        let mut r = LayerRepr {
            name: l.name,
            kind: KindRepr::Conv2d,
            k: None,
            c: None,
            y: None,
            x: None,
            r: None,
            s: None,
            m: None,
            n: None,
            stride: None,
            embedding: None,
        };
        match l.kind {
            LayerKind::Gemm(embedding) => {
                r.kind = KindRepr::Gemm;
                let (m, n, k) = match embedding {
                    GemmEmbedding::Contraction => {
                        (l.dims[Dim::K], l.dims[Dim::Y], l.dims[Dim::C])
                    }
                    GemmEmbedding::Literal => (l.dims[Dim::K], l.dims[Dim::C], l.dims[Dim::Y]),
                };
                r.m = Some(m);
                r.n = Some(n);
                r.k = Some(k);
                r.embedding = Some(embedding);
            }
            kind => {
                r.kind = match kind {
                    LayerKind::DwConv => KindRepr::DwConv,
                    _ => KindRepr::Conv2d,
                };
                r.k = Some(l.dims[Dim::K]);
                r.c = Some(l.dims[Dim::C]);
                r.y = Some(l.dims[Dim::Y]);
                r.x = Some(l.dims[Dim::X]);
                r.r = Some(l.dims[Dim::R]);
                r.s = Some(l.dims[Dim::S]);
                r.stride = Some(l.stride);
            }
        }
        r
    }
}

/// A named sequence of layers evaluated end to end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Model {
    /// Model name, used as a key in reports.
    pub name: String,
    /// Layers in execution order. Names must be unique; duplicate shapes under
    /// distinct names are fine (totals then count each occurrence).
    pub layers: Vec<Layer>,
}

impl Model {
    /// Checks structural validity: nonempty, unique layer names, and every
    /// layer within the extent/stride/work-product bounds.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.name.is_empty() {
            return Err(ModelError::EmptyName);
        }
        if self.layers.is_empty() {
            return Err(ModelError::NoLayers {
                model: self.name.clone(),
            });
        }
        let mut names: Vec<&str> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            layer.validate()?;
            if names.contains(&layer.name.as_str()) {
                return Err(ModelError::DuplicateLayer {
                    layer: layer.name.clone(),
                });
            }
            names.push(&layer.name);
        }
        Ok(())
    }
}

/// Why a model or layer description was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    /// A model or layer name was empty.
    EmptyName,
    /// The model has no layers.
    NoLayers { model: String },
    /// Two layers share a name.
    DuplicateLayer { layer: String },
    /// A dimension extent was zero or above [`MAX_DIM`].
    BadExtent { layer: String, dim: Dim, value: u64 },
    /// The stride was zero or above [`MAX_DIM`].
    BadStride { layer: String, value: u64 },
    /// A depthwise layer declared `C != 1`.
    DepthwiseChannels { layer: String, c: u64 },
    /// The padded work product exceeds [`MAX_WORK_PRODUCT`].
    TooLarge { layer: String },
    /// A layer mixed convolution-form and GEMM-form fields.
    MixedForm { layer: String },
    /// A GEMM layer is missing one of `M`, `N`, `K`.
    IncompleteGemm { layer: String },
    /// A convolution layer is missing one of the six extents.
    IncompleteConv { layer: String },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::EmptyName => write!(f, "empty model or layer name"),
            ModelError::NoLayers { model } => write!(f, "model '{model}' has no layers"),
            ModelError::DuplicateLayer { layer } => {
                write!(f, "duplicate layer name '{layer}'")
            }
            ModelError::BadExtent { layer, dim, value } => write!(
                f,
                "layer '{layer}': extent {dim} = {value} outside 1..={MAX_DIM}"
            ),
            ModelError::BadStride { layer, value } => {
                write!(f, "layer '{layer}': stride {value} outside 1..={MAX_DIM}")
            }
            ModelError::DepthwiseChannels { layer, c } => {
                write!(f, "layer '{layer}': depthwise requires C = 1, found C = {c}")
            }
            ModelError::TooLarge { layer } => {
                write!(f, "layer '{layer}': work product too large for 64-bit accounting")
            }
            ModelError::MixedForm { layer } => write!(
                f,
                "layer '{layer}': mixes convolution-form and GEMM-form fields"
            ),
            ModelError::IncompleteGemm { layer } => {
                write!(f, "layer '{layer}': GEMM form requires M, N and K")
            }
            ModelError::IncompleteConv { layer } => write!(
                f,
                "layer '{layer}': convolution form requires K, C, Y, X, R and S"
            ),
        }
    }
}

/// All divisors of `n` in ascending order. `n` must be nonzero.
pub fn divisors(n: u64) -> Vec<u64> {
    debug_assert!(n > 0);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    large.reverse();
    small.extend_from_slice(&large);
    small
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent divisor-count oracle: trial-divide into prime powers and
    /// multiply the (exponent + 1) terms.
    fn divisor_count_from_factorization(mut n: u64) -> u64 {
        let mut count = 1u64;
        let mut p = 2u64;
        while p * p <= n {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            count *= e + 1;
            p += 1;
        }
        if n > 1 {
            count *= 2;
        }
        count
    }

    #[test]
    fn divisors_of_known_values() {
        assert_eq!(divisors(1), alloc::vec![1]);
        assert_eq!(divisors(12), alloc::vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(224).len(), 12);
        assert_eq!(divisors(3), alloc::vec![1, 3]);
        assert_eq!(divisors(1 << 20).len(), 21);
    }

    #[test]
    fn divisor_counts_multiply_per_dimension() {
        // 32, 3, 224, 224, 3, 3 -> 6 * 2 * 12 * 12 * 2 * 2.
        let layer = Layer::conv2d("c", [32, 3, 224, 224, 3, 3], 1);
        let product: u64 = Dim::ALL
            .into_iter()
            .map(|d| divisors(layer.dims[d]).len() as u64)
            .product();
        assert_eq!(product, 6912);
    }

    #[test]
    fn gemm_embedding_contraction_maps_reduction_to_c() {
        let l = Layer::gemm("fc", 8, 1, 4, GemmEmbedding::Contraction);
        assert_eq!(l.dims, DimVals([8, 4, 1, 1, 1, 1]));
        assert_eq!(l.stride, 1);
        let lit = Layer::gemm("fc", 8, 1, 4, GemmEmbedding::Literal);
        assert_eq!(lit.dims, DimVals([8, 1, 4, 1, 1, 1]));
    }

    #[test]
    fn effective_dims_skip_unit_extents() {
        let l = Layer::conv2d("c", [4, 1, 6, 1, 3, 1], 1);
        let eff = l.effective_dims();
        assert_eq!(eff.len(), 3);
        assert!(eff.contains(Dim::K) && eff.contains(Dim::Y) && eff.contains(Dim::R));
        assert!(!eff.contains(Dim::C));
    }

    #[test]
    fn depthwise_rejects_multiple_input_channels() {
        let mut l = Layer::dwconv("dw", 4, 6, 6, 3, 3, 1);
        assert!(l.validate().is_ok());
        l.dims[Dim::C] = 2;
        assert!(matches!(
            l.validate(),
            Err(ModelError::DepthwiseChannels { .. })
        ));
    }

    #[test]
    fn model_rejects_duplicate_layer_names_but_not_duplicate_shapes() {
        let layer = Layer::conv2d("a", [4, 2, 6, 1, 3, 1], 1);
        let mut twin = layer.clone();
        twin.name = String::from("b");
        let ok = Model {
            name: String::from("m"),
            layers: alloc::vec![layer.clone(), twin],
        };
        assert!(ok.validate().is_ok());
        let dup = Model {
            name: String::from("m"),
            layers: alloc::vec![layer.clone(), layer],
        };
        assert!(matches!(
            dup.validate(),
            Err(ModelError::DuplicateLayer { .. })
        ));
    }

    #[test]
    fn layer_json_round_trips_both_forms() {
        let conv = Layer::conv2d("c1", [32, 3, 224, 224, 3, 3], 2);
        let json = serde_json::to_string(&conv).unwrap();
        assert_eq!(serde_json::from_str::<Layer>(&json).unwrap(), conv);

        let gemm = Layer::gemm("fc", 8, 1, 4, GemmEmbedding::Contraction);
        let json = serde_json::to_string(&gemm).unwrap();
        assert_eq!(serde_json::from_str::<Layer>(&json).unwrap(), gemm);

        let parsed: Layer =
            serde_json::from_str(r#"{"name":"g","kind":"GEMM","M":8,"N":1,"K":4}"#).unwrap();
        assert_eq!(parsed, Layer::gemm("g", 8, 1, 4, GemmEmbedding::Contraction));
    }

    #[test]
    fn layer_json_rejects_unknown_and_mixed_fields() {
        assert!(serde_json::from_str::<Layer>(
            r#"{"name":"c","kind":"CONV2D","K":1,"C":1,"Y":1,"X":1,"R":1,"S":1,"pad":1}"#
        )
        .is_err());
        assert!(serde_json::from_str::<Layer>(
            r#"{"name":"g","kind":"GEMM","M":8,"N":1,"K":4,"Y":2}"#
        )
        .is_err());
        assert!(
            serde_json::from_str::<Layer>(r#"{"name":"g","kind":"GEMM","M":8,"K":4}"#).is_err()
        );
    }

    proptest! {
        #[test]
        fn divisors_match_factorization_oracle(n in 1u64..20_000) {
            let divs = divisors(n);
            prop_assert!(divs.iter().all(|d| n % d == 0));
            prop_assert!(divs.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(divs.len() as u64, divisor_count_from_factorization(n));
        }

        #[test]
        fn gemm_effective_dims_follow_operands(m in 1u64..64, n in 1u64..64, k in 1u64..64) {
            let l = Layer::gemm("g", m, n, k, GemmEmbedding::Contraction);
            let expected = [m, n, k].iter().filter(|&&v| v > 1).count();
            prop_assert_eq!(l.effective_dims().len(), expected);
            prop_assert_eq!(l.macs(), m * n * k);
        }
    }
}
