//! JSON scene files.
//!
//! ```json
//! {
//!   "name": "example",
//!   "group": {"a": [[4, 0], [0, 0.25]], "b": [[2.125, -1.875], [-1.875, 2.125]]},
//!   "automorphism": {"forward": {"a": "a b", "b": "b"}, "inverse": {"a": "a b^-1", "b": "b"}},
//!   "junctures": [{"end": "e1", "sign": "-", "word": "a", "period": 1}],
//!   "markov": {"rects": ["R1", "R2"], "crossings": [[1, 1, 1], [1, 2, 1], [2, 1, 1]]}
//! }
//! ```
//!
//! Without a `markov` block the group, automorphism and junctures are
//! required. Errors carry the JSON path of the offending field.

use std::fmt;
use std::marker::PhantomData;

use indexmap::IndexMap;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{FreeAutomorphism, FuchsianGroup, Word};
use crate::hyperbolic::{Isometry, Tolerances};
use crate::lamination::{JunctureSpec, Presentation, Sign};
use crate::markov::{CrossingTable, CrossingTriple, Degeneracy, Rect4Gon};

/// Object whose keys must be unique; keeps file order.
struct UniqueMap<V>(IndexMap<String, V>);

impl<'de, V: Deserialize<'de>> Deserialize<'de> for UniqueMap<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V_<V>(PhantomData<V>);
        impl<'de, V: Deserialize<'de>> Visitor<'de> for V_<V> {
            type Value = UniqueMap<V>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object with unique keys")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut out = IndexMap::new();
                while let Some(k) = map.next_key::<String>()? {
                    if out.contains_key(&k) {
                        return Err(de::Error::custom(format!("duplicate key \"{k}\"")));
                    }
                    let v = map.next_value()?;
                    out.insert(k, v);
                }
                Ok(UniqueMap(out))
            }
        }
        d.deserialize_map(V_(PhantomData))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    name: Option<String>,
    description: Option<String>,
    group: Option<UniqueMap<[[f64; 2]; 2]>>,
    automorphism: Option<RawAutomorphism>,
    junctures: Option<Vec<RawJuncture>>,
    markov: Option<RawMarkov>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAutomorphism {
    forward: UniqueMap<String>,
    inverse: UniqueMap<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJuncture {
    end: String,
    sign: Sign,
    word: String,
    period: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarkov {
    rects: Vec<RawRect>,
    #[serde(default)]
    crossings: Vec<RawCrossing>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRect {
    Id(String),
    Full {
        id: String,
        #[serde(default = "full")]
        degeneracy: Degeneracy,
        anchor: Option<[[f64; 2]; 4]>,
    },
}

fn full() -> Degeneracy {
    Degeneracy::Full
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawCrossing {
    Plain(usize, usize, i64),
    Oriented(usize, usize, i64, String),
}

/// Rectangles and their crossing table.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovBlock {
    pub rects: Vec<Rect4Gon>,
    pub table: CrossingTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub name: Option<String>,
    pub description: Option<String>,
    /// Generator matrices exactly as written, in file order.
    pub matrices: Vec<(String, [[f64; 2]; 2])>,
    pub group: Option<FuchsianGroup>,
    pub automorphism: Option<FreeAutomorphism>,
    pub junctures: Vec<JunctureSpec>,
    pub markov: Option<MarkovBlock>,
}

impl Scene {
    pub fn group(&self) -> Result<&FuchsianGroup> {
        self.group
            .as_ref()
            .ok_or_else(|| Error::scene("group", "scene has no group"))
    }

    pub fn presentation(&self) -> Result<Presentation> {
        let group = self.group()?.clone();
        let phi = self
            .automorphism
            .clone()
            .ok_or_else(|| Error::scene("automorphism", "scene has no automorphism"))?;
        Presentation::new(group, phi)
    }

    pub fn markov(&self) -> Result<&MarkovBlock> {
        self.markov
            .as_ref()
            .ok_or_else(|| Error::scene("markov", "scene has no markov block"))
    }
}

fn json_error(e: serde_path_to_error::Error<serde_json::Error>) -> Error {
    let inner = e.inner();
    let (line, column) = (inner.line(), inner.column());
    let mut path = e.path().to_string();
    let mut message = inner.to_string();
    // "missing field `x` at line ..": name the field in the path itself.
    if let Some(rest) = message.strip_prefix("missing field `") {
        if let Some(field) = rest.split('`').next() {
            path = if path == "." {
                field.to_string()
            } else {
                format!("{path}.{field}")
            };
            message = "missing field".to_string();
        }
    } else if let Some(i) = message.find(" at line ") {
        message.truncate(i);
    }
    if path == "." {
        path = "<root>".to_string();
    }
    Error::scene(path, format!("{message} (line {line}, column {column})"))
}

fn parse_words(map: &UniqueMap<String>, group: &FuchsianGroup, path: &str) -> Result<Vec<Word>> {
    for k in map.0.keys() {
        if !group.names().contains(k) {
            return Err(Error::scene(format!("{path}.{k}"), "unknown generator"));
        }
    }
    group
        .names()
        .iter()
        .map(|name| {
            let text = map
                .0
                .get(name)
                .ok_or_else(|| Error::scene(format!("{path}.{name}"), "missing substitution"))?;
            group
                .parse_word(text)
                .map_err(|e| Error::scene(format!("{path}.{name}"), strip(e)))
        })
        .collect()
}

/// Error text without the variant prefix, for use under a path.
fn strip(e: Error) -> String {
    match e {
        Error::Validation(m) => m,
        other => other.to_string(),
    }
}

pub fn parse_scene(text: &str) -> Result<Scene> {
    parse_scene_with(text, &Tolerances::default())
}

pub fn parse_scene_with(text: &str, tol: &Tolerances) -> Result<Scene> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawScene = serde_path_to_error::deserialize(de).map_err(json_error)?;
    let has_markov = raw.markov.is_some();
    let require = |present: bool, what: &str| {
        if present || has_markov {
            Ok(())
        } else {
            Err(Error::scene(what, "missing field"))
        }
    };
    require(raw.group.is_some(), "group")?;
    require(raw.automorphism.is_some(), "automorphism")?;
    require(raw.junctures.is_some(), "junctures")?;

    let had_group = raw.group.is_some();
    let matrices: Vec<(String, [[f64; 2]; 2])> = raw
        .group
        .map(|g| g.0.into_iter().collect())
        .unwrap_or_default();
    let group = if matrices.is_empty() {
        if !had_group {
            None
        } else {
            return Err(Error::scene("group", "group needs at least one generator"));
        }
    } else {
        let mut gens = Vec::with_capacity(matrices.len());
        for (name, m) in &matrices {
            let iso =
                Isometry::new(*m).map_err(|e| Error::scene(format!("group.{name}"), strip(e)))?;
            gens.push((name.clone(), iso));
        }
        Some(
            FuchsianGroup::with_tolerance(gens, tol.eps_trace).map_err(|e| {
                let msg = strip(e);
                let path = matrices
                    .iter()
                    .find(|(n, _)| msg.contains(&format!("generator {n} ")))
                    .map_or("group".to_string(), |(n, _)| format!("group.{n}"));
                Error::scene(path, msg)
            })?,
        )
    };

    let automorphism = match raw.automorphism {
        None => None,
        Some(a) => {
            let g = group
                .as_ref()
                .ok_or_else(|| Error::scene("automorphism", "an automorphism needs a group"))?;
            let forward = parse_words(&a.forward, g, "automorphism.forward")?;
            let inverse = parse_words(&a.inverse, g, "automorphism.inverse")?;
            let phi = FreeAutomorphism::new(forward, inverse)
                .map_err(|e| Error::scene("automorphism", strip(e)))?;
            if let Some(&bad) = phi.verify().failing_generators.first() {
                return Err(Error::scene(
                    "automorphism",
                    format!(
                        "automorphism round trip fails at generator {}",
                        g.names()[bad]
                    ),
                ));
            }
            Some(phi)
        }
    };

    let mut junctures = Vec::new();
    for (k, j) in raw.junctures.unwrap_or_default().into_iter().enumerate() {
        let path = format!("junctures[{k}]");
        let g = group
            .as_ref()
            .ok_or_else(|| Error::scene(&path, "junctures need a group"))?;
        if automorphism.is_none() {
            return Err(Error::scene(&path, "junctures need an automorphism"));
        }
        let word = g
            .parse_word(&j.word)
            .map_err(|e| Error::scene(format!("{path}.word"), strip(e)))?;
        let spec = JunctureSpec::new(j.end, j.sign, word, j.period)
            .map_err(|e| Error::scene(&path, strip(e)))?;
        spec.validate(g, tol.eps_trace)
            .map_err(|e| Error::scene(format!("{path}.word"), strip(e)))?;
        junctures.push(spec);
    }

    let markov = raw.markov.map(parse_markov).transpose()?;
    Ok(Scene {
        name: raw.name,
        description: raw.description,
        matrices,
        group,
        automorphism,
        junctures,
        markov,
    })
}

fn parse_markov(raw: RawMarkov) -> Result<MarkovBlock> {
    let mut rects: Vec<Rect4Gon> = Vec::with_capacity(raw.rects.len());
    for (k, r) in raw.rects.into_iter().enumerate() {
        let rect = match r {
            RawRect::Id(id) => Rect4Gon::new(id, Degeneracy::Full),
            RawRect::Full {
                id,
                degeneracy,
                anchor,
            } => {
                if anchor.is_some_and(|a| a.iter().flatten().any(|v| !v.is_finite())) {
                    return Err(Error::scene(
                        format!("markov.rects[{k}].anchor"),
                        "non-finite coordinate",
                    ));
                }
                Rect4Gon {
                    id,
                    degeneracy,
                    anchor,
                }
            }
        };
        if rects.iter().any(|o| o.id == rect.id) {
            return Err(Error::scene(
                format!("markov.rects[{k}]"),
                format!("duplicate rectangle id {}", rect.id),
            ));
        }
        rects.push(rect);
    }
    let triples: Vec<CrossingTriple> = raw
        .crossings
        .into_iter()
        .map(|c| match c {
            RawCrossing::Plain(i, j, count) => CrossingTriple::new(i, j, count),
            RawCrossing::Oriented(i, j, count, o) => CrossingTriple {
                orientation: Some(o),
                ..CrossingTriple::new(i, j, count)
            },
        })
        .collect();
    let table = CrossingTable::from_triples(rects.len(), &triples)
        .map_err(|e| Error::scene("markov.crossings", strip(e)))?;
    Ok(MarkovBlock { rects, table })
}

#[derive(Serialize)]
struct OutRect<'a> {
    id: &'a str,
    degeneracy: Degeneracy,
    #[serde(skip_serializing_if = "Option::is_none")]
    anchor: Option<[[f64; 2]; 4]>,
}

/// Writes the validated fields back in the input schema.
pub fn serialize_scene(scene: &Scene) -> String {
    let mut root = serde_json::Map::new();
    if let Some(n) = &scene.name {
        root.insert("name".into(), json!(n));
    }
    if let Some(d) = &scene.description {
        root.insert("description".into(), json!(d));
    }
    if let Some(g) = &scene.group {
        let mut gm = serde_json::Map::new();
        for (name, m) in &scene.matrices {
            gm.insert(name.clone(), json!(m));
        }
        root.insert("group".into(), Value::Object(gm));
        if let Some(phi) = &scene.automorphism {
            let words = |ws: &[Word]| {
                let mut m = serde_json::Map::new();
                for (name, w) in g.names().iter().zip(ws) {
                    m.insert(name.clone(), json!(g.format_word(w)));
                }
                Value::Object(m)
            };
            root.insert(
                "automorphism".into(),
                json!({"forward": words(phi.forward()), "inverse": words(phi.inverse())}),
            );
        }
        let js: Vec<Value> = scene
            .junctures
            .iter()
            .map(|j| {
                json!({"end": j.end, "sign": j.sign, "word": g.format_word(&j.word), "period": j.period})
            })
            .collect();
        if scene.automorphism.is_some() {
            root.insert("junctures".into(), Value::Array(js));
        }
    }
    if let Some(mb) = &scene.markov {
        let rects: Vec<OutRect> = mb
            .rects
            .iter()
            .map(|r| OutRect {
                id: &r.id,
                degeneracy: r.degeneracy,
                anchor: r.anchor,
            })
            .collect();
        let crossings: Vec<Value> = mb
            .table
            .triples()
            .into_iter()
            .map(|t| match t.orientation {
                Some(o) => json!([t.i, t.j, t.count, o]),
                None => json!([t.i, t.j, t.count]),
            })
            .collect();
        root.insert(
            "markov".into(),
            json!({"rects": rects, "crossings": crossings}),
        );
    }
    let mut out = serde_json::to_string_pretty(&Value::Object(root)).expect("scene serializes");
    out.push('\n');
    out
}
