//! Bessel functions of the first kind of integer order.
//!
//! Evaluated by Miller's backward recurrence normalised with
//! `J_0 + 2 Σ J_{2k} = 1`. The recurrence runs downward from an order
//! well above both `n` and `x`, where the true sequence is negligible, so
//! the same path is stable for every order and argument; intermediate
//! values are rescaled before they can overflow.

const RESCALE_AT: f64 = 1e200;
const RESCALE_BY: f64 = 1e-200;

/// `J_m(x)` for integer `m` and `x >= 0`.
///
/// Negative orders use `J_{-m}(x) = (-1)^m J_m(x)`.
pub fn bessel_j(m: i32, x: f64) -> f64 {
    let n = m.unsigned_abs() as usize;
    let value = if x < 0.0 {
        // J_n(-x) = (-1)^n J_n(x)
        let v = jn_nonneg(n, -x);
        if n % 2 == 1 {
            -v
        } else {
            v
        }
    } else {
        jn_nonneg(n, x)
    };
    if m < 0 && n % 2 == 1 {
        -value
    } else {
        value
    }
}

fn start_order(n: usize, x: f64) -> usize {
    let top = (n as f64).max(x);
    let start = (top + 20.0 + (40.0 * top).sqrt()).ceil() as usize;
    start + (start % 2)
}

fn jn_nonneg(n: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let start = start_order(n, x);
    let two_over_x = 2.0 / x;
    let mut j_next = 0.0; // J_{k+1}
    let mut j_curr = 1e-30; // J_k, arbitrary seed
    let mut even_sum = 0.0; // Σ_{k>=1} J_{2k}
    let mut at_n = if start == n { j_curr } else { 0.0 };
    for k in (1..=start).rev() {
        let j_prev = k as f64 * two_over_x * j_curr - j_next;
        j_next = j_curr;
        j_curr = j_prev;
        if k % 2 == 1 && k > 1 {
            // j_curr now holds J_{k-1} with k-1 even and >= 2
            even_sum += j_curr;
        }
        if k - 1 == n {
            at_n = j_curr;
        }
        if j_curr.abs() > RESCALE_AT {
            j_curr *= RESCALE_BY;
            j_next *= RESCALE_BY;
            even_sum *= RESCALE_BY;
            at_n *= RESCALE_BY;
        }
    }
    // j_curr is J_0 (unnormalised)
    let norm = j_curr + 2.0 * even_sum;
    at_n / norm
}

/// All orders `J_0 .. J_max_order` at a single argument, in one recurrence.
pub fn bessel_j_table(max_order: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; max_order + 1];
        out[0] = 1.0;
        return out;
    }
    let start = start_order(max_order, x);
    let two_over_x = 2.0 / x;
    let mut out = vec![0.0; max_order + 1];
    let mut j_next = 0.0;
    let mut j_curr = 1e-30;
    let mut even_sum = 0.0;
    if start <= max_order {
        out[start] = j_curr;
    }
    for k in (1..=start).rev() {
        let j_prev = k as f64 * two_over_x * j_curr - j_next;
        j_next = j_curr;
        j_curr = j_prev;
        if k % 2 == 1 && k > 1 {
            even_sum += j_curr;
        }
        if k - 1 <= max_order {
            out[k - 1] = j_curr;
        }
        if j_curr.abs() > RESCALE_AT {
            j_curr *= RESCALE_BY;
            j_next *= RESCALE_BY;
            even_sum *= RESCALE_BY;
            for v in out.iter_mut() {
                *v *= RESCALE_BY;
            }
        }
    }
    let norm = j_curr + 2.0 * even_sum;
    out.iter_mut().for_each(|v| *v /= norm);
    out
}
