//! d-separation by reachability ("Bayes ball").
//!
//! A trail from `X` is followed through `(node, direction)` states. Arriving
//! from a child (upward) at an unobserved node, the trail may continue to
//! parents or children. Arriving from a parent (downward), it continues to
//! children when the node is unobserved, and back up to parents when the
//! node is a collider with itself or a descendant in `Z`.

use super::UtilityNetwork;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    Up,
    Down,
}

pub(super) fn d_separated(net: &UtilityNetwork, x: &[usize], y: &[usize], z: &[usize]) -> bool {
    let n = net.len();
    let mut observed = vec![false; n];
    for &v in z {
        observed[v] = true;
    }
    let z_ancestors = net.ancestral_closure(z.iter().copied());
    let mut target = vec![false; n];
    for &v in y {
        target[v] = true;
    }

    let mut visited = [vec![false; n], vec![false; n]];
    let slot = |d: Dir| usize::from(d == Dir::Down);
    let mut stack: Vec<(usize, Dir)> = x.iter().map(|&v| (v, Dir::Up)).collect();
    while let Some((v, dir)) = stack.pop() {
        if std::mem::replace(&mut visited[slot(dir)][v], true) {
            continue;
        }
        if !observed[v] && target[v] {
            return false;
        }
        match dir {
            Dir::Up if !observed[v] => {
                stack.extend(net.parents[v].iter().map(|&p| (p, Dir::Up)));
                stack.extend(net.children[v].iter().map(|&c| (c, Dir::Down)));
            }
            Dir::Up => {}
            Dir::Down => {
                if !observed[v] {
                    stack.extend(net.children[v].iter().map(|&c| (c, Dir::Down)));
                }
                if z_ancestors[v] {
                    stack.extend(net.parents[v].iter().map(|&p| (p, Dir::Up)));
                }
            }
        }
    }
    true
}
