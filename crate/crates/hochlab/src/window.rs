//! Truncation windows: the finite-dimensionality contract.
//!
//! Every identity and cohomology dimension in the crate is checked inside a
//! window. The caps have fixed meanings:
//!
//! * `order_cap` bounds the total derivation count of a tensor (the sum of
//!   the slot orders plus the coefficient order); for a plain operator this
//!   is just its order.
//! * `arity_cap` bounds cochain arities.
//! * `degree_cap` bounds polynomial coefficient degrees where a weight does
//!   not already pin them.
//! * `weight` fixes a Bernstein-graded slice (`deg x = +1`, `deg d = -1`);
//!   every differential in the crate preserves it, so windows at a fixed
//!   weight are finite-dimensional subcomplexes.
//! * `bar_length_cap` bounds bar word length; bar operations that would
//!   overflow it report the overflow rather than truncating silently.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationWindow {
    pub nvars: usize,
    pub order_cap: u32,
    pub arity_cap: u32,
    pub degree_cap: u32,
    pub weight: Option<i64>,
    pub bar_length_cap: usize,
}

impl TruncationWindow {
    pub fn new(nvars: usize, order_cap: u32, arity_cap: u32) -> Self {
        TruncationWindow {
            nvars,
            order_cap,
            arity_cap,
            degree_cap: order_cap + 3,
            weight: None,
            bar_length_cap: 2,
        }
    }

    pub fn with_degree_cap(mut self, cap: u32) -> Self {
        self.degree_cap = cap;
        self
    }

    pub fn with_weight(mut self, w: i64) -> Self {
        self.weight = Some(w);
        self
    }

    pub fn with_bar_length(mut self, l: usize) -> Self {
        self.bar_length_cap = l;
        self
    }

    /// The window with order and arity caps raised by one; used by the
    /// stability checks.
    pub fn enlarged(&self) -> Self {
        let mut w = self.clone();
        w.order_cap += 1;
        w.arity_cap += 1;
        w.degree_cap += 1;
        w
    }
}
