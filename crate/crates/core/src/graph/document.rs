use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{Instance, InstanceError, VertexId};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct InstanceDoc {
    pub vertices: Vec<String>,
    pub even: IndexMap<String, String>,
    pub odd: IndexMap<String, String>,
    pub origin: String,
    pub destination: String,
}

impl InstanceDoc {
    pub(crate) fn from_instance(instance: &Instance) -> Self {
        let name = |v: VertexId| instance.name(v).to_string();
        InstanceDoc {
            vertices: instance.names().to_vec(),
            even: instance
                .vertices()
                .map(|v| (name(v), name(instance.even(v))))
                .collect(),
            odd: instance
                .vertices()
                .map(|v| (name(v), name(instance.odd(v))))
                .collect(),
            origin: name(instance.origin()),
            destination: name(instance.destination()),
        }
    }

    pub(crate) fn into_instance(self) -> Result<Instance, InstanceError> {
        let mut index = IndexMap::with_capacity(self.vertices.len());
        for (i, name) in self.vertices.iter().enumerate() {
            if index.insert(name.as_str(), VertexId(i)).is_some() {
                return Err(InstanceError::DuplicateVertex(name.clone()));
            }
        }
        let lookup = |name: &str, context: String| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| InstanceError::UnknownVertex {
                    vertex: name.to_string(),
                    context,
                })
        };
        let mut slots = Vec::with_capacity(2);
        for (slot, table) in [("even", &self.even), ("odd", &self.odd)] {
            for key in table.keys() {
                lookup(key, format!("key of \"{slot}\""))?;
            }
            let mut targets = Vec::with_capacity(self.vertices.len());
            for name in &self.vertices {
                let target = table
                    .get(name)
                    .ok_or_else(|| InstanceError::MissingSuccessor {
                        vertex: name.clone(),
                        slot,
                    })?;
                targets.push(lookup(target, format!("{slot} successor of `{name}`"))?);
            }
            slots.push(targets);
        }
        let odd = slots.pop().expect("two slots");
        let even = slots.pop().expect("two slots");
        let origin = lookup(&self.origin, "origin".to_string())?;
        let destination = lookup(&self.destination, "destination".to_string())?;
        Instance::new(self.vertices, even, odd, origin, destination)
    }
}

/// Parses an instance document.
///
/// ```json
/// {"vertices": ["o", "d"], "even": {"o": "d", "d": "d"},
///  "odd": {"o": "d", "d": "d"}, "origin": "o", "destination": "d"}
/// ```
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let doc: InstanceDoc =
        serde_json::from_str(text).map_err(|e| InstanceError::Malformed(e.to_string()))?;
    doc.into_instance()
}

/// Serializes an instance as a pretty-printed document with keys in
/// declaration order. Output ends with a newline.
pub fn serialize_instance(instance: &Instance) -> String {
    let mut out = serde_json::to_string_pretty(&InstanceDoc::from_instance(instance))
        .expect("instance documents always serialize");
    out.push('\n');
    out
}
