//! Max-parity games solved with Zielonka's algorithm.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    Even,
    Odd,
}

impl Player {
    fn of(priority: u8) -> Player {
        if priority.is_multiple_of(2) {
            Player::Even
        } else {
            Player::Odd
        }
    }

    fn other(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }
}

/// Explicit game graph. Every node needs at least one successor.
#[derive(Debug, Clone, Default)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub priority: Vec<u8>,
    pub succ: Vec<Vec<usize>>,
}

impl ParityGame {
    pub fn add(&mut self, owner: Player, priority: u8) -> usize {
        self.owner.push(owner);
        self.priority.push(priority);
        self.succ.push(Vec::new());
        self.owner.len() - 1
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    /// Winning region of player Even.
    pub fn solve(&self) -> Vec<bool> {
        let n = self.len();
        let mut pred = vec![Vec::new(); n];
        for v in 0..n {
            debug_assert!(!self.succ[v].is_empty(), "dead end in parity game");
            for &w in &self.succ[v] {
                pred[w].push(v);
            }
        }
        let all = vec![true; n];
        let (even, _) = self.zielonka(&all, &pred);
        even
    }

    fn attractor(&self, within: &[bool], target: &[bool], p: Player, pred: &[Vec<usize>]) -> Vec<bool> {
        let n = self.len();
        let mut attr = target.to_vec();
        let mut count: Vec<usize> = (0..n)
            .map(|v| self.succ[v].iter().filter(|&&w| within[w]).count())
            .collect();
        let mut stack: Vec<usize> = (0..n).filter(|&v| attr[v]).collect();
        while let Some(w) = stack.pop() {
            for &v in &pred[w] {
                if !within[v] || attr[v] {
                    continue;
                }
                let take = if self.owner[v] == p {
                    true
                } else {
                    count[v] -= 1;
                    count[v] == 0
                };
                if take {
                    attr[v] = true;
                    stack.push(v);
                }
            }
        }
        attr
    }

    fn zielonka(&self, within: &[bool], pred: &[Vec<usize>]) -> (Vec<bool>, Vec<bool>) {
        let n = self.len();
        let Some(d) = (0..n).filter(|&v| within[v]).map(|v| self.priority[v]).max() else {
            return (vec![false; n], vec![false; n]);
        };
        let p = Player::of(d);
        let top: Vec<bool> = (0..n).map(|v| within[v] && self.priority[v] == d).collect();
        let a = self.attractor(within, &top, p, pred);
        let rest: Vec<bool> = (0..n).map(|v| within[v] && !a[v]).collect();
        let (w0, w1) = self.zielonka(&rest, pred);
        let (wp, wo) = pick(p, w0, w1);
        if !wo.iter().any(|&b| b) {
            let _ = wp;
            return unpick(p, within.to_vec(), vec![false; n]);
        }
        let b = self.attractor(within, &wo, p.other(), pred);
        let rest: Vec<bool> = (0..n).map(|v| within[v] && !b[v]).collect();
        let (w0, w1) = self.zielonka(&rest, pred);
        let (wp, mut wo) = pick(p, w0, w1);
        for v in 0..n {
            wo[v] |= b[v];
        }
        unpick(p, wp, wo)
    }
}

fn pick(p: Player, w0: Vec<bool>, w1: Vec<bool>) -> (Vec<bool>, Vec<bool>) {
    match p {
        Player::Even => (w0, w1),
        Player::Odd => (w1, w0),
    }
}

fn unpick(p: Player, wp: Vec<bool>, wo: Vec<bool>) -> (Vec<bool>, Vec<bool>) {
    pick(p, wp, wo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_games() {
        // Even chooses between an odd self-loop and an even cycle
        let mut g = ParityGame::default();
        let a = g.add(Player::Even, 0);
        let b = g.add(Player::Odd, 1);
        let c = g.add(Player::Odd, 2);
        g.succ[a] = vec![b, c];
        g.succ[b] = vec![b];
        g.succ[c] = vec![a];
        assert_eq!(g.solve(), vec![true, false, true]);
        // Odd controls the choice now
        g.owner[a] = Player::Odd;
        assert_eq!(g.solve(), vec![false, false, false]);
    }
}
