//! Route enumeration against brute force over node sequences.

use std::collections::BTreeSet;

use bizland_core::network::{enumerate_routes, Network, DEFAULT_MAX_ROUTES};
use bizland_core::{fixtures, NodeId};

/// Every simple node sequence from `from` to `to` whose consecutive pairs
/// are links, found by trying all orderings of all subsets of other nodes.
fn brute_force(network: &Network, from: NodeId, to: NodeId) -> BTreeSet<Vec<NodeId>> {
    let links: BTreeSet<(NodeId, NodeId)> = network.links().iter().map(|l| (l.tail, l.head)).collect();
    let others: Vec<NodeId> = network.nodes().iter().copied().filter(|&n| n != from && n != to).collect();
    let mut found = BTreeSet::new();
    for mask in 0u32..(1 << others.len()) {
        let subset: Vec<NodeId> = (0..others.len()).filter(|i| mask & (1 << i) != 0).map(|i| others[i]).collect();
        permute(&subset, &mut Vec::new(), &mut vec![false; subset.len()], &mut |middle| {
            let mut seq = vec![from];
            seq.extend_from_slice(middle);
            seq.push(to);
            if seq.windows(2).all(|w| links.contains(&(w[0], w[1]))) {
                found.insert(seq);
            }
        });
    }
    found
}

fn permute(items: &[NodeId], prefix: &mut Vec<NodeId>, used: &mut [bool], visit: &mut impl FnMut(&[NodeId])) {
    if prefix.len() == items.len() {
        visit(prefix);
        return;
    }
    for i in 0..items.len() {
        if !used[i] {
            used[i] = true;
            prefix.push(items[i]);
            permute(items, prefix, used, visit);
            prefix.pop();
            used[i] = false;
        }
    }
}

#[test]
fn six_node_routes_match_brute_force() {
    let model = fixtures::six_node([40.0, 60.0]);
    let net = &model.network;
    let routes = enumerate_routes(net, DEFAULT_MAX_ROUTES).unwrap();
    let mut total = 0;
    for (r, origin) in net.origins().iter().enumerate() {
        for (s, &dest) in net.destinations().iter().enumerate() {
            let od = routes.od_index(r, s);
            let listed: Vec<Vec<NodeId>> = routes.routes(od).iter().map(|p| p.nodes.clone()).collect();
            let expected: Vec<Vec<NodeId>> = brute_force(net, origin.node, dest).into_iter().collect();
            // Listed in lexicographic node order.
            assert_eq!(listed, expected, "origin {} destination {dest}", origin.node);
            total += listed.len();
        }
    }
    assert_eq!(total, routes.path_count());
    // Node 4 is reached only through node 3; node 5 through 3 or 6.
    assert_eq!(routes.routes(routes.od_index(0, 0)).len(), 1);
    assert_eq!(routes.routes(routes.od_index(0, 1)).len(), 2);
}

#[test]
fn link_sequences_follow_nodes() {
    let model = fixtures::six_node([40.0, 60.0]);
    let links = model.network.links();
    for p in 0..model.routes.path_count() {
        let route = model.routes.route(p);
        assert_eq!(route.links.len() + 1, route.nodes.len());
        for (k, &a) in route.links.iter().enumerate() {
            assert_eq!((links[a].tail, links[a].head), (route.nodes[k], route.nodes[k + 1]));
        }
    }
}
