//! Plain-text network description.
//!
//! ```text
//! # comment
//! [nodes]
//! 1
//! 2
//! [links]
//! # tail head free_flow coefficient power      t(x) = free_flow + coefficient * x^power
//! 1 2 10 0.5 1
//! [origins]
//! # node demand
//! 1 10
//! [destinations]
//! # node trip_base firm_gain crowding crowding_quadratic business_base customer_gain rivalry
//! 2 20 1 0.5 0.01 5 0.3 1
//! [firms]
//! 4
//! ```
//!
//! Rows are whitespace separated; `#` starts a comment. Every section must
//! appear exactly once.

use std::fmt::Write as _;

use bizland_core::behavior::{Attraction, BusinessAttraction, LinkTime, TripAttraction};
use bizland_core::network::{Link, Origin};
use bizland_core::{Behavior, LogitParams, Model, Network, NodeId};
use serde::Serialize;

use crate::Failure;

const SECTIONS: [&str; 5] = ["nodes", "links", "origins", "destinations", "firms"];

/// Parsed rows exactly as written (comments and surrounding space removed).
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Echo {
    pub nodes: Vec<String>,
    pub links: Vec<String>,
    pub origins: Vec<String>,
    pub destinations: Vec<String>,
    pub firms: Vec<String>,
}

impl Echo {
    fn section(&mut self, name: &str) -> &mut Vec<String> {
        match name {
            "nodes" => &mut self.nodes,
            "links" => &mut self.links,
            "origins" => &mut self.origins,
            "destinations" => &mut self.destinations,
            _ => &mut self.firms,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkFile {
    pub nodes: Vec<NodeId>,
    pub links: Vec<(Link, LinkTime)>,
    pub origins: Vec<Origin>,
    pub destinations: Vec<(NodeId, Attraction)>,
    pub firms: f64,
    pub echo: Echo,
}

fn error(line: usize, message: impl std::fmt::Display) -> Failure {
    Failure::Parse(format!("line {line}: {message}"))
}

fn number(line: usize, token: &str) -> Result<f64, Failure> {
    token
        .parse::<f64>()
        .map_err(|_| error(line, format_args!("`{token}` is not a number")))
}

fn node(line: usize, token: &str) -> Result<NodeId, Failure> {
    token
        .parse::<NodeId>()
        .map_err(|_| error(line, format_args!("`{token}` is not a node id")))
}

impl NetworkFile {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut echo = Echo::default();
        let mut seen: Vec<&str> = Vec::new();
        let mut current: Option<&str> = None;
        let mut file = NetworkFile {
            nodes: Vec::new(),
            links: Vec::new(),
            origins: Vec::new(),
            destinations: Vec::new(),
            firms: f64::NAN,
            echo: Echo::default(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let name = name.trim();
                let Some(&known) = SECTIONS.iter().find(|&&s| s == name) else {
                    return Err(error(line, format_args!("unknown section [{name}]")));
                };
                if seen.contains(&known) {
                    return Err(error(line, format_args!("section [{name}] repeated")));
                }
                seen.push(known);
                current = Some(known);
                continue;
            }
            let Some(section) = current else {
                return Err(error(line, "row before the first section"));
            };
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let expect = |n: usize| {
                if tokens.len() == n {
                    Ok(())
                } else {
                    Err(error(
                        line,
                        format_args!("[{section}] rows have {n} fields, found {}", tokens.len()),
                    ))
                }
            };
            match section {
                "nodes" => {
                    expect(1)?;
                    file.nodes.push(node(line, tokens[0])?);
                }
                "links" => {
                    expect(5)?;
                    let link = Link {
                        tail: node(line, tokens[0])?,
                        head: node(line, tokens[1])?,
                    };
                    let time = LinkTime {
                        free_flow: number(line, tokens[2])?,
                        coefficient: number(line, tokens[3])?,
                        power: number(line, tokens[4])?,
                    };
                    file.links.push((link, time));
                }
                "origins" => {
                    expect(2)?;
                    file.origins.push(Origin {
                        node: node(line, tokens[0])?,
                        demand: number(line, tokens[1])?,
                    });
                }
                "destinations" => {
                    expect(8)?;
                    let v = tokens[1..]
                        .iter()
                        .map(|t| number(line, t))
                        .collect::<Result<Vec<_>, _>>()?;
                    let attraction = Attraction {
                        trip: TripAttraction {
                            base: v[0],
                            firm_gain: v[1],
                            crowding: v[2],
                            crowding_quadratic: v[3],
                        },
                        business: BusinessAttraction {
                            base: v[4],
                            customer_gain: v[5],
                            rivalry: v[6],
                        },
                    };
                    file.destinations.push((node(line, tokens[0])?, attraction));
                }
                _ => {
                    expect(1)?;
                    if !file.firms.is_nan() {
                        return Err(error(line, "[firms] holds a single value"));
                    }
                    file.firms = number(line, tokens[0])?;
                }
            }
            echo.section(section).push(tokens.join(" "));
        }
        if let Some(missing) = SECTIONS.iter().find(|s| !seen.contains(s)) {
            return Err(Failure::Parse(format!("missing section [{missing}]")));
        }
        if file.firms.is_nan() {
            return Err(Failure::Parse("[firms] is empty".into()));
        }
        file.echo = echo;
        Ok(file)
    }

    /// Builds and validates the model.
    pub fn to_model(&self, logit: LogitParams, max_routes: usize) -> Result<Model, Failure> {
        let network = Network::new(
            self.nodes.clone(),
            self.links.iter().map(|&(l, _)| l).collect(),
            self.origins.clone(),
            self.destinations.iter().map(|&(n, _)| n).collect(),
            self.firms,
        )?;
        let behavior = Behavior {
            links: self.links.iter().map(|&(_, t)| t).collect(),
            destinations: self.destinations.iter().map(|&(_, a)| a).collect(),
        };
        Ok(Model::new(network, behavior, logit, max_routes)?)
    }

    /// Network file text for a model. Numbers use the shortest form that
    /// parses back to the same value.
    pub fn render(model: &Model) -> String {
        let net = &model.network;
        let mut out = String::from("[nodes]\n");
        for n in net.nodes() {
            let _ = writeln!(out, "{n}");
        }
        out += "\n[links]\n# tail head free_flow coefficient power\n";
        for (l, t) in net.links().iter().zip(&model.behavior.links) {
            let _ = writeln!(out, "{} {} {} {} {}", l.tail, l.head, t.free_flow, t.coefficient, t.power);
        }
        out += "\n[origins]\n# node demand\n";
        for o in net.origins() {
            let _ = writeln!(out, "{} {}", o.node, o.demand);
        }
        out += "\n[destinations]\n";
        out += "# node trip_base firm_gain crowding crowding_quadratic business_base customer_gain rivalry\n";
        for (n, a) in net.destinations().iter().zip(&model.behavior.destinations) {
            let (t, b) = (a.trip, a.business);
            let _ = writeln!(
                out,
                "{n} {} {} {} {} {} {} {}",
                t.base, t.firm_gain, t.crowding, t.crowding_quadratic, b.base, b.customer_gain, b.rivalry
            );
        }
        let _ = write!(out, "\n[firms]\n{}\n", net.total_firms());
        out
    }
}
