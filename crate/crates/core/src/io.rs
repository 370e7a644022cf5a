//! Graph files, window selectors and float formatting.
//!
//! Graph file:
//! `{"vertices":[{"id":"a","role":"interior"}],"edges":[["a","b",1.0]],"window":["a"]}`.
//! Ids may be strings or integers. Roles are advisory except that Ω is the set
//! of vertices marked `interior`; δΩ is always recomputed. `window` is
//! optional.

use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{build_domain, Domain, GraphBuilder, Role, VertexId, WeightedGraph};

/// Writes non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`.
pub fn serialize_f64<S: Serializer>(value: &f64, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    if value.is_finite() {
        serializer.serialize_f64(*value)
    } else {
        serializer.serialize_str(&format_f64(*value))
    }
}

/// 17 significant digits; `inf`, `-inf`, `nan` otherwise.
pub fn format_f64(value: f64) -> String {
    if value.is_nan() {
        "nan".into()
    } else if value.is_infinite() {
        if value > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{value:.16e}")
    }
}

/// serde_json formatter printing every float with 17 significant digits.
#[derive(Debug, Clone, Default)]
pub struct PreciseFormatter {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.inner.$name(writer $(, $arg)*)
            }
        )*
    };
}

impl serde_json::ser::Formatter for PreciseFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{}", format_f64(value))
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        end_object_key();
        begin_object_value();
        end_object_value();
    }
}

/// Pretty JSON with 17-significant-digit floats.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, PreciseFormatter::default());
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexKey {
    Int(u64),
    Name(String),
}

impl VertexKey {
    fn label(&self) -> String {
        match self {
            VertexKey::Int(i) => i.to_string(),
            VertexKey::Name(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: VertexKey,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<(VertexKey, VertexKey, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Vec<VertexKey>>,
}

/// A parsed graph file.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: WeightedGraph,
    pub domain: Domain,
    /// The window stored in the file, if any.
    pub window: Option<Vec<VertexId>>,
}

pub fn parse_graph(text: &str) -> Result<LoadedGraph> {
    let file: GraphFile = serde_json::from_str(text)?;
    graph_from_file(&file)
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<LoadedGraph> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn graph_from_file(file: &GraphFile) -> Result<LoadedGraph> {
    let mut builder = GraphBuilder::new();
    let mut interior = Vec::new();
    for entry in &file.vertices {
        let label = entry.id.label();
        let before = builder.vertex_count();
        let id = builder.vertex(&label);
        if id < before {
            return Err(Error::Parse(format!("vertex {label} listed twice")));
        }
        match entry.role.as_deref() {
            Some("interior") => interior.push(id),
            None | Some("boundary-candidate") | Some("boundary") | Some("outside") => {}
            Some(other) => return Err(Error::Parse(format!("vertex {label}: unknown role {other:?}"))),
        }
    }
    let known = builder.vertex_count();
    let lookup = |builder: &mut GraphBuilder, key: &VertexKey| -> Result<VertexId> {
        let label = key.label();
        let id = builder.vertex(&label);
        if id >= known {
            return Err(Error::UnknownVertex(label));
        }
        Ok(id)
    };
    for (u, v, w) in &file.edges {
        let u = lookup(&mut builder, u)?;
        let v = lookup(&mut builder, v)?;
        builder.edge(u, v, *w)?;
    }
    let window = match &file.window {
        None => None,
        Some(keys) => Some(keys.iter().map(|k| lookup(&mut builder, k)).collect::<Result<Vec<_>>>()?),
    };
    let graph = builder.build();
    let domain = build_domain(&graph, &interior)?;
    Ok(LoadedGraph { graph, domain, window })
}

/// Serializes the pruned domain, and optionally a window, as a graph file that
/// reloads to the same domain.
pub fn domain_to_file(domain: &Domain, window: Option<&[VertexId]>) -> GraphFile {
    let key = |x: VertexId| VertexKey::Name(domain.name(x).into_owned());
    let vertices = domain
        .closure()
        .into_iter()
        .map(|x| VertexEntry {
            id: key(x),
            role: Some(
                match domain.role(x) {
                    Role::Interior => "interior",
                    _ => "boundary-candidate",
                }
                .into(),
            ),
        })
        .collect();
    let edges = domain.graph().edges().map(|(u, v, w)| (key(u), key(v), w)).collect();
    GraphFile {
        vertices,
        edges,
        window: window.map(|w| w.iter().map(|&x| key(x)).collect()),
    }
}

pub fn write_graph(path: impl AsRef<Path>, domain: &Domain, window: Option<&[VertexId]>) -> Result<()> {
    let text = to_json_string(&domain_to_file(domain, window))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Resolves a window selector against a domain.
///
/// * `all`: every vertex of Ω̄.
/// * `a..b`: the vertices labelled a, a+1, …, b (inclusive).
/// * `a,b,c`: the listed labels.
/// * `file`: the window stored in the graph file.
pub fn resolve_window(selector: &str, loaded: &LoadedGraph) -> Result<Vec<VertexId>> {
    let selector = selector.trim();
    let domain = &loaded.domain;
    let find = |label: &str| -> Result<VertexId> {
        let label = label.trim();
        loaded
            .graph
            .id(label)
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))
    };
    let members = match selector {
        "all" => domain.closure(),
        "file" => loaded
            .window
            .clone()
            .ok_or_else(|| Error::Parse("graph file has no window".into()))?,
        s if s.contains("..") => {
            let (a, b) = s.split_once("..").unwrap();
            let parse = |t: &str| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad window range {s:?}")))
            };
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                return Err(Error::Parse(format!("empty window range {s:?}")));
            }
            (a..=b).map(|i| find(&i.to_string())).collect::<Result<Vec<_>>>()?
        }
        s => s.split(',').map(find).collect::<Result<Vec<_>>>()?,
    };
    Ok(members)
}
