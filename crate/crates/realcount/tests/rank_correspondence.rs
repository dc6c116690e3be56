//! Exact-rational rank identities: radial scaling of a cone framework
//! preserves the rigidity-matrix rank, and the spherical tangent Jacobian
//! has the same rank as the rigidity matrix of the central projection.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use realcount::graph::{k33, three_prism, Graph};
use realcount::linalg::rank_rational;
use realcount::rigidity::{rigidity_matrix_rational, spherical_jacobian_stack_rational};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn radial_scaling_preserves_cone_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x25);
    let mut done = 0;
    while done < 20 {
        let n = rng.gen_range(3..=5u32);
        let d = rng.gen_range(2..=3usize);
        // Random base graph, then cone it; the apex sits at the origin.
        let mut edges = Vec::new();
        for u in 1..=n {
            for v in (u + 1)..=n {
                if rng.gen_bool(0.6) {
                    edges.push((u, v));
                }
            }
        }
        let cone = Graph::new(n, edges).unwrap().cone();
        let apex = cone.vertex_count() as usize - 1;
        let mut p: Vec<Vec<BigRational>> = (0..cone.vertex_count() as usize)
            .map(|_| {
                (0..d)
                    .map(|_| rat(rng.gen_range(-1000..=1000), 1))
                    .collect()
            })
            .collect();
        p[apex] = vec![rat(0, 1); d];

        // Scale each non-apex point by a random nonzero rational.
        let scaled: Vec<Vec<BigRational>> = p
            .iter()
            .enumerate()
            .map(|(i, point)| {
                if i == apex {
                    point.clone()
                } else {
                    let r = rat(rng.gen_range(1..=40), rng.gen_range(1..=7))
                        * rat(if rng.gen_bool(0.5) { 1 } else { -1 }, 1);
                    point.iter().map(|x| x * &r).collect()
                }
            })
            .collect();

        let base_rank = rank_rational(&rigidity_matrix_rational(&cone, &p));
        let scaled_rank = rank_rational(&rigidity_matrix_rational(&cone, &scaled));
        assert_eq!(base_rank, scaled_rank, "cone rank changed under scaling");
        done += 1;
    }
}

/// A rational point on the unit sphere S^2 via stereographic projection of
/// a rational plane point, with nonzero last coordinate.
fn rational_sphere_point(rng: &mut ChaCha8Rng) -> Vec<BigRational> {
    loop {
        let a1 = rat(rng.gen_range(-12..=12), rng.gen_range(1..=5));
        let a2 = rat(rng.gen_range(-12..=12), rng.gen_range(1..=5));
        let s = &a1 * &a1 + &a2 * &a2;
        let one = rat(1, 1);
        if s == one {
            continue;
        }
        let denom = &one + &s;
        let q3 = (&one - &s) / &denom;
        if q3 == rat(0, 1) {
            continue;
        }
        let two = rat(2, 1);
        return vec![&two * &a1 / &denom, &two * &a2 / &denom, q3];
    }
}

#[test]
fn central_projection_preserves_jacobian_rank() {
    let graphs = [
        three_prism(),
        k33(),
        Graph::complete(4),
        Graph::cycle(4),
        Graph::path(3),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x42);
    for g in &graphs {
        for _ in 0..10 {
            let n = g.vertex_count() as usize;
            let q: Vec<Vec<BigRational>> = (0..n).map(|_| rational_sphere_point(&mut rng)).collect();
            // Central projection p_i = q_i / q_3.
            let p: Vec<Vec<BigRational>> = q
                .iter()
                .map(|qi| vec![&qi[0] / &qi[2], &qi[1] / &qi[2]])
                .collect();
            let euclid_rank = rank_rational(&rigidity_matrix_rational(g, &p));

            // Spherical Jacobian restricted to the tangent space: the rank
            // of the stacked matrix minus the vertex count.
            let stacked = spherical_jacobian_stack_rational(g, &q);
            let sphere_rank = rank_rational(&stacked) - n;
            assert_eq!(
                euclid_rank, sphere_rank,
                "rank mismatch on {g:?}"
            );
        }
    }
}
