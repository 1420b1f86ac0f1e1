use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::matroid::descriptor::MatroidDescriptor;
use crate::matroid::{build_partition, WeightedComplex};

const BUNDLED: [&str; 7] = [
    include_str!("../../catalog/u23.json"),
    include_str!("../../catalog/u24.json"),
    include_str!("../../catalog/u35.json"),
    include_str!("../../catalog/k4.json"),
    include_str!("../../catalog/partition-3x2.json"),
    include_str!("../../catalog/partition-4x2.json"),
    include_str!("../../catalog/theta-1.json"),
];

/// A named weighted complex.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub complex: WeightedComplex,
}

impl Instance {
    pub fn from_descriptor(d: &MatroidDescriptor, fallback_id: &str) -> Result<Self> {
        Ok(Instance { id: d.id_or(fallback_id), complex: d.complex()? })
    }
}

/// The bundled test instances: three uniform matroids, the complete graph
/// on four vertices, two partition matroids with blocks of size two, and
/// the weighted rank-2 family on four elements at `theta = 1`.
pub fn bundled() -> Vec<Instance> {
    BUNDLED
        .iter()
        .enumerate()
        .map(|(i, text)| {
            let d = MatroidDescriptor::from_json(text).expect("bundled descriptors parse");
            Instance::from_descriptor(&d, &format!("bundled-{i}")).expect("bundled descriptors build")
        })
        .collect()
}

/// Descriptors from JSON text: a single object or an array of objects.
pub fn parse_instances(text: &str) -> Result<Vec<Instance>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let items = match v {
        Value::Array(items) => items,
        other => vec![other],
    };
    items
        .into_iter()
        .enumerate()
        .map(|(i, item)| {
            let d: MatroidDescriptor = serde_json::from_value(item).map_err(|e| Error::Parse(e.to_string()))?;
            Instance::from_descriptor(&d, &format!("instance-{i}"))
        })
        .collect()
}

pub fn load_instances(path: &Path) -> Result<Vec<Instance>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_instances(&text)
}

/// Partition matroid with `n` blocks of two elements; its bases-exchange
/// walk is the lazy random walk on the `n`-cube.
pub fn hypercube(n: usize) -> Result<Instance> {
    let blocks: Vec<Vec<usize>> = (0..n).map(|i| vec![2 * i, 2 * i + 1]).collect();
    Ok(Instance { id: format!("cube-{n}"), complex: WeightedComplex::uniform(build_partition(&blocks)?)? })
}
