//! Plain decision trees: the solver's output format.
//!
//! A [`PlainTree`] is a decision tree detached from any search state. The
//! JSON form is `{"cut": {"dim": i, "thr": t}, "left": ..., "right": ...}`
//! for inner vertices and `{"class": "red"}` / `{"class": "blue"}` for
//! leaves.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::{ClassLabel, DataSet};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlainCut<V> {
    pub dim: usize,
    pub thr: V,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlainTree<V> {
    Inner {
        cut: PlainCut<V>,
        left: Box<PlainTree<V>>,
        right: Box<PlainTree<V>>,
    },
    Leaf {
        class: ClassLabel,
    },
}

impl<V: Value> PlainTree<V> {
    pub fn leaf(class: ClassLabel) -> Self {
        PlainTree::Leaf { class }
    }

    /// Number of inner vertices.
    pub fn size(&self) -> usize {
        match self {
            PlainTree::Leaf { .. } => 0,
            PlainTree::Inner { left, right, .. } => 1 + left.size() + right.size(),
        }
    }

    pub fn classify(&self, coords: &[V]) -> ClassLabel {
        match self {
            PlainTree::Leaf { class } => *class,
            PlainTree::Inner { cut, left, right } => {
                if coords[cut.dim] <= cut.thr {
                    left.classify(coords)
                } else {
                    right.classify(coords)
                }
            }
        }
    }

    /// Fraction of examples the tree classifies correctly.
    pub fn accuracy_on(&self, ds: &DataSet<V>) -> f64 {
        if ds.n() == 0 {
            return 1.0;
        }
        let hits = ds
            .examples()
            .iter()
            .filter(|e| self.classify(&e.coords) == e.label)
            .count();
        hits as f64 / ds.n() as f64
    }

    pub fn is_perfect_on(&self, ds: &DataSet<V>) -> bool {
        ds.examples().iter().all(|e| self.classify(&e.coords) == e.label)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Graphviz rendering; `dim_names` labels the cut dimensions when given.
    pub fn to_dot(&self, dim_names: Option<&[String]>) -> String {
        let mut out = String::from("digraph tree {\n  node [shape=box];\n");
        let mut next = 0usize;
        self.dot_vertex(&mut out, &mut next, dim_names);
        out.push_str("}\n");
        out
    }

    fn dot_vertex(&self, out: &mut String, next: &mut usize, names: Option<&[String]>) -> usize {
        let id = *next;
        *next += 1;
        match self {
            PlainTree::Leaf { class } => {
                let _ = writeln!(
                    out,
                    "  v{id} [label=\"{class}\", style=filled, fillcolor={}];",
                    match class {
                        ClassLabel::Red => "lightcoral",
                        ClassLabel::Blue => "lightblue",
                    }
                );
            }
            PlainTree::Inner { cut, left, right } => {
                let dim = names
                    .and_then(|n| n.get(cut.dim).cloned())
                    .unwrap_or_else(|| format!("d{}", cut.dim));
                let _ = writeln!(out, "  v{id} [label=\"{dim} <= {}\"];", cut.thr);
                let l = left.dot_vertex(out, next, names);
                let _ = writeln!(out, "  v{id} -> v{l} [label=\"yes\"];");
                let r = right.dot_vertex(out, next, names);
                let _ = writeln!(out, "  v{id} -> v{r} [label=\"no\"];");
            }
        }
        id
    }
}
