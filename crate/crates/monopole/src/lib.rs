//! Charged-particle motion in generalized Dirac monopole fields on ℝ^(2k+1).
//!
//! A magnetic pole of strength λ sits at the origin of ℝⁿ, n = 2k+1, and
//! sources an so(2k)-valued gauge field defined away from the negative
//! n-axis (the string singularity). A particle carries an internal charge
//! ξ on the adjoint orbit O_λ ⊂ so(2k); its position feels the Lorentz-type
//! force of the paired field while ξ is parallel-transported by the
//! potential. For k = 1 this is the classical Poincaré problem
//! r̈ = λ (r × ṙ)/r³.
//!
//! The crate integrates that system and verifies its structure numerically:
//!
//! * [`polyvec`]: exterior algebra over ℝⁿ in grades one to three
//!   (wedge, inner product, interior product, 3-vector subspaces, Hodge
//!   duality inside a 3-dimensional subspace).
//! * [`liealg`]: so(2k) generators, invariant inner product, brackets,
//!   Pfaffian, and the adjoint orbit O_λ of admissible charges.
//! * [`gauge`]: the potential and field strength of the pole, the paired
//!   field, force, charge transport, and a residual suite for the field
//!   identities they satisfy.
//! * [`dynamics`]: fixed-step RK4 and an embedded adaptive pair on the
//!   flattened state (r, v, ξ), with string/radius guards.
//! * [`geometry`]: the conserved quantities L (angular momentum 2-vector),
//!   V (orbit 3-vector), the effective angular momentum L̄, the motion cone
//!   with its aperture and axis, isometric development of trajectories, and
//!   a closed-form cone-geodesic oracle.
//! * [`cli`]: JSON config, CSV/JSON outputs, and the `simulate`, `verify`,
//!   `cone`, `compare` pipelines behind the `monopole` binary.
//!
//! With the default `parallel` feature the batch verification paths run on
//! rayon; disabling it falls back to equivalent sequential loops with
//! bit-identical results.

pub mod cli;
pub mod dynamics;
pub mod gauge;
pub mod geometry;
pub mod liealg;
pub mod polyvec;

pub(crate) mod mat;
pub(crate) mod par;
