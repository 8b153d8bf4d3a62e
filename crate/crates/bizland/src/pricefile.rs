//! Pricing files: one row per link and per destination, plus the state
//! the charges were evaluated at.
//!
//! ```text
//! kind full
//! # link tail head toll
//! link 1 2 0.75
//! # destination node entrance_fee business_tax
//! destination 3 -1.2 0.4
//! # path nodes flow            (evaluation state)
//! path 1-2-3 4.5
//! # firms node count
//! firms 3 2.5
//! ```
//!
//! `kind` is `road` or `full`. Link and destination rows are required for
//! every link and destination; path rows for every route and firm rows for
//! every destination.

use std::fmt::Write as _;

use bizland_core::{Charges, CombinedState, Model, NodeId, PricingScheme, SchemeKind};

use crate::Failure;

fn kind_name(kind: SchemeKind) -> &'static str {
    match kind {
        SchemeKind::RoadOnly => "road",
        SchemeKind::Full => "full",
    }
}

pub fn path_label(nodes: &[NodeId]) -> String {
    nodes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("-")
}

pub fn render(model: &Model, scheme: &PricingScheme) -> String {
    let net = &model.network;
    let c = &scheme.charges;
    let s = &scheme.evaluated_at;
    let mut out = format!("kind {}\n# link tail head toll\n", kind_name(scheme.kind));
    for (l, toll) in net.links().iter().zip(&c.link_toll) {
        let _ = writeln!(out, "link {} {} {toll}", l.tail, l.head);
    }
    out += "# destination node entrance_fee business_tax\n";
    for (k, n) in net.destinations().iter().enumerate() {
        let _ = writeln!(out, "destination {n} {} {}", c.entrance_fee[k], c.business_tax[k]);
    }
    out += "# path nodes flow\n";
    for p in 0..model.routes.path_count() {
        let _ = writeln!(out, "path {} {}", path_label(&model.routes.route(p).nodes), s.path_flow[p]);
    }
    out += "# firms node count\n";
    for (k, n) in net.destinations().iter().enumerate() {
        let _ = writeln!(out, "firms {n} {}", s.firms[k]);
    }
    out
}

fn fail(line: usize, message: impl std::fmt::Display) -> Failure {
    Failure::Parse(format!("line {line}: {message}"))
}

fn value(line: usize, token: &str) -> Result<f64, Failure> {
    token
        .parse()
        .map_err(|_| fail(line, format_args!("`{token}` is not a number")))
}

fn node(line: usize, token: &str) -> Result<NodeId, Failure> {
    token
        .parse()
        .map_err(|_| fail(line, format_args!("`{token}` is not a node id")))
}

/// Fills `slot` once, rejecting duplicates.
fn assign(slot: &mut Option<f64>, v: f64, line: usize, what: &str) -> Result<(), Failure> {
    if slot.replace(v).is_some() {
        return Err(fail(line, format_args!("{what} listed twice")));
    }
    Ok(())
}

pub fn parse(text: &str, model: &Model) -> Result<PricingScheme, Failure> {
    let net = &model.network;
    let (nl, nd, np) = (model.link_count(), model.destination_count(), model.routes.path_count());
    let mut kind = None;
    let mut tolls = vec![None; nl];
    let mut fees = vec![None; nd];
    let mut taxes = vec![None; nd];
    let mut flows = vec![None; np];
    let mut firms = vec![None; nd];
    let dest_index = |line: usize, n: NodeId| {
        net.destinations()
            .iter()
            .position(|&d| d == n)
            .ok_or_else(|| Failure::Validation(format!("line {line}: {n} is not a destination")))
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let t: Vec<&str> = content.split_whitespace().collect();
        let arity = |n: usize| {
            if t.len() == n {
                Ok(())
            } else {
                Err(fail(line, format_args!("`{}` rows have {n} fields", t[0])))
            }
        };
        match t[0] {
            "kind" => {
                arity(2)?;
                kind = Some(match t[1] {
                    "road" => SchemeKind::RoadOnly,
                    "full" => SchemeKind::Full,
                    other => return Err(fail(line, format_args!("unknown kind `{other}`"))),
                });
            }
            "link" => {
                arity(4)?;
                let (tail, head) = (node(line, t[1])?, node(line, t[2])?);
                let a = net
                    .links()
                    .iter()
                    .position(|l| l.tail == tail && l.head == head)
                    .ok_or_else(|| Failure::Validation(format!("line {line}: no link {tail} -> {head}")))?;
                assign(&mut tolls[a], value(line, t[3])?, line, "link")?;
            }
            "destination" => {
                arity(4)?;
                let s = dest_index(line, node(line, t[1])?)?;
                assign(&mut fees[s], value(line, t[2])?, line, "destination")?;
                taxes[s] = Some(value(line, t[3])?);
            }
            "path" => {
                arity(3)?;
                let nodes = t[1]
                    .split('-')
                    .map(|n| node(line, n))
                    .collect::<Result<Vec<_>, _>>()?;
                let p = (0..np)
                    .find(|&p| model.routes.route(p).nodes == nodes)
                    .ok_or_else(|| Failure::Validation(format!("line {line}: {} is not a route", t[1])))?;
                assign(&mut flows[p], value(line, t[2])?, line, "path")?;
            }
            "firms" => {
                arity(3)?;
                let s = dest_index(line, node(line, t[1])?)?;
                assign(&mut firms[s], value(line, t[2])?, line, "firms")?;
            }
            other => return Err(fail(line, format_args!("unknown row type `{other}`"))),
        }
    }
    let complete = |v: Vec<Option<f64>>, what: &str| {
        v.into_iter()
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Failure::Validation(format!("pricing file is missing {what} rows")))
    };
    let charges = Charges {
        link_toll: complete(tolls, "link")?,
        entrance_fee: complete(fees, "destination")?,
        business_tax: complete(taxes, "destination")?,
    };
    let evaluated_at =
        CombinedState::from_path_flows(&model.routes, complete(flows, "path")?, complete(firms, "firms")?)?;
    Ok(PricingScheme {
        kind: kind.ok_or_else(|| Failure::Parse("missing `kind` row".into()))?,
        charges,
        evaluated_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use bizland_core::equilibrium::random_start;
    use bizland_core::fixtures;
    use bizland_core::pricing::extract_pricing;

    #[test]
    fn round_trip_is_exact() {
        let model = fixtures::six_node([40.0, 60.0]);
        let scheme = extract_pricing(&model, &random_start(&model, 3));
        let back = parse(&render(&model, &scheme), &model).unwrap();
        assert_eq!(back, scheme);
    }

    #[test]
    fn missing_rows_are_reported() {
        let model = fixtures::tiny();
        let scheme = extract_pricing(&model, &random_start(&model, 3));
        let text = render(&model, &scheme);
        let without_link: String = text
            .lines()
            .filter(|l| !l.starts_with("link 1 2 "))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(matches!(parse(&without_link, &model), Err(Failure::Validation(_))));
        let unknown = text.replace("link 1 2 ", "link 2 1 ");
        assert!(matches!(parse(&unknown, &model), Err(Failure::Validation(_))));
        assert!(matches!(parse("kind free\n", &model), Err(Failure::Parse(_))));
    }
}
