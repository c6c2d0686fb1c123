//! The output graph of an enumeration run: nodes are surface classes,
//! edges are isogenies labeled by beta, kernel type and originating step.
//! Exports to DOT and to a JSON document that round-trips losslessly.

use std::sync::Arc;

use crate::galois::Guards;
use crate::kernels::IsogenyType;
use crate::lattice::{QLattice, SurfaceNode};
use crate::num_util::{fmt_rat, parse_rat, rat, Int};
use crate::rqfield::{FieldContext, FieldElement, Ideal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeOrigin {
    Reduction,
    HurwitzMaass,
    Step2,
    Step4,
}

impl EdgeOrigin {
    pub fn as_str(&self) -> &'static str {
        match self {
            EdgeOrigin::Reduction => "reduction",
            EdgeOrigin::HurwitzMaass => "hm",
            EdgeOrigin::Step2 => "step2",
            EdgeOrigin::Step4 => "step4",
        }
    }

    fn parse(s: &str) -> Option<EdgeOrigin> {
        match s {
            "reduction" => Some(EdgeOrigin::Reduction),
            "hm" => Some(EdgeOrigin::HurwitzMaass),
            "step2" => Some(EdgeOrigin::Step2),
            "step4" => Some(EdgeOrigin::Step4),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub beta: FieldElement,
    /// Kernel type triple; absent when the kernel is not ring stable.
    pub types: Option<IsogenyType>,
    /// Abstract kernel shape as cyclic orders, largest first.
    pub shape: Vec<Int>,
    pub origin: EdgeOrigin,
}

#[derive(Debug, Clone)]
pub struct IsogenyGraph {
    pub ctx: Arc<FieldContext>,
    pub nodes: Vec<SurfaceNode>,
    pub edges: Vec<GraphEdge>,
    pub guards: Guards,
    pub scenario_hash: u64,
    /// False when max_nodes stopped the exploration early.
    pub complete: bool,
    /// Step-2 application counter per node; each entry must be <= 1.
    pub step2_applications: Vec<u32>,
}

impl IsogenyGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count_by_origin(&self, origin: EdgeOrigin) -> usize {
        self.edges.iter().filter(|e| e.origin == origin).count()
    }

    /// Deterministic edge order: by endpoints, then origin, then label.
    pub fn sort_edges(&mut self) {
        self.edges.sort_by(|a, b| {
            (a.from, a.to, a.origin, a.beta, &a.shape).cmp(&(b.from, b.to, b.origin, b.beta, &b.shape))
        });
    }

    pub fn to_dot(&self) -> String {
        let ctx = &self.ctx;
        let mut out = String::from("digraph isogeny_class {\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let st = match crate::lattice::steinitz_class_index(node) {
                Some(s) => s.to_string(),
                None => "-".to_string(),
            };
            out.push_str(&format!(
                "  n{i} [label=\"n{i} c={} st={}\"];\n",
                node.conductor(),
                st
            ));
        }
        for e in &self.edges {
            let types = match &e.types {
                Some(t) => format!(
                    " cyc={} tor={} inert={}",
                    t.cyc.format(ctx),
                    t.tor.format(ctx),
                    t.inert.format(ctx)
                ),
                None => String::new(),
            };
            let shape = e
                .shape
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("x");
            out.push_str(&format!(
                "  n{} -> n{} [label=\"b={}{} shape={} {}\"];\n",
                e.from,
                e.to,
                ctx.format_element(e.beta),
                types,
                shape,
                e.origin.as_str()
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        let ctx = &self.ctx;
        let elt = |e: &FieldElement| {
            serde_json::json!([fmt_rat(&e.a), fmt_rat(&e.b)])
        };
        let ideal_json = |i: &Ideal| {
            let (a, b, c, den) = i.hnf();
            serde_json::json!({"a": a.to_string(), "b": b.to_string(), "c": c.to_string(), "den": den.to_string()})
        };
        let disc = match ctx.discriminant() {
            Some(d) => serde_json::json!(d as i64),
            None => serde_json::json!("split"),
        };
        let nodes: Vec<serde_json::Value> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let rows: Vec<Vec<String>> = n
                    .lattice()
                    .integer_rows()
                    .iter()
                    .map(|r| r.iter().map(|x| x.to_string()).collect())
                    .collect();
                serde_json::json!({
                    "label": format!("n{i}"),
                    "den": n.lattice().den().to_string(),
                    "rows": rows,
                    "theta": elt(&n.theta()),
                    "conductor": n.conductor().to_string(),
                })
            })
            .collect();
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|e| {
                let types = match &e.types {
                    Some(t) => serde_json::json!({
                        "cyc": ideal_json(&t.cyc),
                        "tor": ideal_json(&t.tor),
                        "inert": ideal_json(&t.inert),
                    }),
                    None => serde_json::Value::Null,
                };
                serde_json::json!({
                    "from": e.from,
                    "to": e.to,
                    "beta": elt(&e.beta),
                    "types": types,
                    "shape": e.shape.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                    "origin": e.origin.as_str(),
                })
            })
            .collect();
        let mut step2 = serde_json::Map::new();
        for (i, &c) in self.step2_applications.iter().enumerate() {
            step2.insert(format!("n{i}"), serde_json::json!(c));
        }
        let doc = serde_json::json!({
            "discriminant": disc,
            "scenario_hash": format!("{:016x}", self.scenario_hash),
            "guards": {
                "max_nodes": self.guards.max_nodes,
                "max_prime": self.guards.max_prime as i64,
                "max_beta_norm": self.guards.max_beta_norm as i64,
            },
            "complete": self.complete,
            "nodes": nodes,
            "edges": edges,
            "report": {
                "node_count": self.nodes.len(),
                "edge_count": self.edges.len(),
                "edges_reduction": self.edge_count_by_origin(EdgeOrigin::Reduction),
                "edges_hm": self.edge_count_by_origin(EdgeOrigin::HurwitzMaass),
                "edges_step2": self.edge_count_by_origin(EdgeOrigin::Step2),
                "edges_step4": self.edge_count_by_origin(EdgeOrigin::Step4),
                "step2_applications": step2,
            },
        });
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
    }
}

/// Reads a graph document back; inverse of [`IsogenyGraph::to_json`].
pub fn read_graph(document: &str) -> Result<IsogenyGraph, String> {
    let v: serde_json::Value =
        serde_json::from_str(document).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = v.as_object().ok_or("expected an object")?;
    let ctx = match obj.get("discriminant") {
        Some(serde_json::Value::String(s)) if s == "split" => Arc::new(FieldContext::split()),
        Some(serde_json::Value::Number(n)) => Arc::new(
            FieldContext::real_quadratic(n.as_i64().ok_or("bad discriminant")? as Int)
                .map_err(|e| e.to_string())?,
        ),
        _ => return Err("missing discriminant".to_string()),
    };
    let parse_int = |v: &serde_json::Value, what: &str| -> Result<Int, String> {
        match v {
            serde_json::Value::String(s) => s.parse::<Int>().map_err(|e| format!("{what}: {e}")),
            serde_json::Value::Number(n) => {
                n.as_i64().map(|x| x as Int).ok_or(format!("{what}: not an integer"))
            }
            _ => Err(format!("{what}: expected integer")),
        }
    };
    let parse_elt = |v: &serde_json::Value| -> Result<FieldElement, String> {
        let arr = v.as_array().filter(|a| a.len() == 2).ok_or("bad element")?;
        let a = arr[0].as_str().and_then(parse_rat).ok_or("bad rational")?;
        let b = arr[1].as_str().and_then(parse_rat).ok_or("bad rational")?;
        Ok(FieldElement::new(a, b))
    };
    let guards_obj = obj.get("guards").and_then(|g| g.as_object()).ok_or("missing guards")?;
    let guards = Guards {
        max_nodes: parse_int(guards_obj.get("max_nodes").ok_or("guards.max_nodes")?, "max_nodes")?
            as usize,
        max_prime: parse_int(guards_obj.get("max_prime").ok_or("guards.max_prime")?, "max_prime")?,
        max_beta_norm: parse_int(
            guards_obj.get("max_beta_norm").ok_or("guards.max_beta_norm")?,
            "max_beta_norm",
        )?,
    };
    let hash = obj
        .get("scenario_hash")
        .and_then(|h| h.as_str())
        .and_then(|h| u64::from_str_radix(h, 16).ok())
        .ok_or("missing scenario_hash")?;
    let complete = obj.get("complete").and_then(|c| c.as_bool()).ok_or("missing complete")?;

    let mut nodes = Vec::new();
    for (i, nv) in obj
        .get("nodes")
        .and_then(|n| n.as_array())
        .ok_or("missing nodes")?
        .iter()
        .enumerate()
    {
        let nobj = nv.as_object().ok_or(format!("nodes[{i}]: expected object"))?;
        let den = parse_int(nobj.get("den").ok_or("node den")?, "den")?;
        let rows_v = nobj.get("rows").and_then(|r| r.as_array()).ok_or("node rows")?;
        let mut coord_rows = Vec::new();
        for row in rows_v {
            let cells = row.as_array().filter(|r| r.len() == 4).ok_or("node row")?;
            let mut out = [rat(0, 1); 4];
            for (j, c) in cells.iter().enumerate() {
                out[j] = rat(parse_int(c, "row entry")?, den);
            }
            coord_rows.push(out);
        }
        let lattice = QLattice::from_coord_rows(&coord_rows).ok_or("rank-deficient lattice")?;
        let theta = parse_elt(nobj.get("theta").ok_or("node theta")?)?;
        let node = SurfaceNode::new(Arc::clone(&ctx), lattice, theta)
            .map_err(|e| format!("nodes[{i}]: {e}"))?;
        nodes.push(node);
    }

    let parse_ideal = |v: &serde_json::Value| -> Result<Ideal, String> {
        let o = v.as_object().ok_or("ideal: expected object")?;
        let a = parse_int(o.get("a").ok_or("ideal.a")?, "a")?;
        let b = parse_int(o.get("b").ok_or("ideal.b")?, "b")?;
        let c = parse_int(o.get("c").ok_or("ideal.c")?, "c")?;
        let den = parse_int(o.get("den").ok_or("ideal.den")?, "den")?;
        let gens = [
            FieldElement::new(rat(a, den), rat(0, 1)),
            FieldElement::new(rat(b, den), rat(c, den)),
        ];
        Ideal::from_generators(&ctx, &gens).map_err(|e| e.to_string())
    };
    let mut edges = Vec::new();
    for (i, ev) in obj
        .get("edges")
        .and_then(|e| e.as_array())
        .ok_or("missing edges")?
        .iter()
        .enumerate()
    {
        let eobj = ev.as_object().ok_or(format!("edges[{i}]: expected object"))?;
        let from = eobj.get("from").and_then(|f| f.as_u64()).ok_or("edge from")? as usize;
        let to = eobj.get("to").and_then(|f| f.as_u64()).ok_or("edge to")? as usize;
        if from >= nodes.len() || to >= nodes.len() {
            return Err(format!("edges[{i}]: endpoint out of range"));
        }
        let beta = parse_elt(eobj.get("beta").ok_or("edge beta")?)?;
        let types = match eobj.get("types") {
            None | Some(serde_json::Value::Null) => None,
            Some(tv) => {
                let tobj = tv.as_object().ok_or("edge types")?;
                Some(IsogenyType {
                    cyc: parse_ideal(tobj.get("cyc").ok_or("types.cyc")?)?,
                    tor: parse_ideal(tobj.get("tor").ok_or("types.tor")?)?,
                    inert: parse_ideal(tobj.get("inert").ok_or("types.inert")?)?,
                })
            }
        };
        let shape = eobj
            .get("shape")
            .and_then(|s| s.as_array())
            .ok_or("edge shape")?
            .iter()
            .map(|x| parse_int(x, "shape entry"))
            .collect::<Result<Vec<_>, _>>()?;
        let origin = eobj
            .get("origin")
            .and_then(|o| o.as_str())
            .and_then(EdgeOrigin::parse)
            .ok_or("edge origin")?;
        edges.push(GraphEdge { from, to, beta, types, shape, origin });
    }
    let step2_applications = obj
        .get("report")
        .and_then(|r| r.get("step2_applications"))
        .and_then(|s| s.as_object())
        .map(|m| {
            (0..nodes.len())
                .map(|i| m.get(&format!("n{i}")).and_then(|v| v.as_u64()).unwrap_or(0) as u32)
                .collect()
        })
        .unwrap_or_else(|| vec![0; nodes.len()]);
    Ok(IsogenyGraph {
        ctx,
        nodes,
        edges,
        guards,
        scenario_hash: hash,
        complete,
        step2_applications,
    })
}

/// Structural equality for round-trip checks.
pub fn graphs_equal(a: &IsogenyGraph, b: &IsogenyGraph) -> bool {
    a.ctx == b.ctx
        && a.nodes == b.nodes
        && a.edges == b.edges
        && a.guards == b.guards
        && a.scenario_hash == b.scenario_hash
        && a.complete == b.complete
        && a.step2_applications == b.step2_applications
}
