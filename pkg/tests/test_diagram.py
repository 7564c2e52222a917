import numpy as np
import pytest

from scatkit.catalog import pole_diagram, single_vertex_diagram, threshold_diagram, triangle_diagram
from scatkit.diagram import (
    Diagram,
    DiagramFormatError,
    ExternalLine,
    InternalLine,
    KConfiguration,
    ParticleSpec,
    conservation_residual,
    kinematic_violations,
    load_diagram,
    load_kconfig,
    loop_count,
    save_diagram,
    save_kconfig,
    validate_diagram,
)
from scatkit.errors import DisconnectedDiagramError
from scatkit.fourvector import FourVector
from scatkit.kinematics import onshell, pole_surface_config


def test_single_vertex_is_smallest_legal_diagram():
    d = single_vertex_diagram()
    rep = validate_diagram(d)
    assert rep.valid
    assert (rep.n_internal, rep.n_vertices, rep.n_external) == (0, 1, 4)
    assert rep.loops == 0


def test_disconnected_diagram_reported():
    d = Diagram(
        vertices=["A", "B", "C"],
        internal=[InternalLine("A", "B", ParticleSpec(1.0))],
        external=[
            ExternalLine("A", ParticleSpec(1.0), "initial"),
            ExternalLine("A", ParticleSpec(1.0), "initial"),
            ExternalLine("B", ParticleSpec(1.0), "final"),
            ExternalLine("C", ParticleSpec(1.0), "initial"),
            ExternalLine("C", ParticleSpec(1.0), "final"),
        ],
    )
    rep = validate_diagram(d)
    assert not rep.valid
    assert any("disconnected" in v for v in rep.violations)
    assert rep.loops is None
    with pytest.raises(DisconnectedDiagramError):
        loop_count(d)


def test_triangle_fixture_counts():
    rep = validate_diagram(triangle_diagram())
    assert rep.valid
    assert rep.n_internal == 3
    assert rep.n_vertices == 3
    assert rep.n_external == 6


@pytest.mark.parametrize(
    "diagram,expected",
    [(pole_diagram(), 0), (triangle_diagram(), 1), (threshold_diagram(), 1)],
)
def test_loop_count(diagram, expected):
    assert loop_count(diagram) == expected
    assert loop_count(diagram) == diagram.n_internal - diagram.n_vertices + 1


def test_low_degree_flag():
    d = Diagram(
        vertices=["A"],
        internal=[],
        external=[ExternalLine("A", ParticleSpec(1.0), "initial")],
    )
    assert not validate_diagram(d).valid
    d2 = Diagram(d.vertices, d.internal, d.external, allow_low_degree=True)
    assert validate_diagram(d2).valid


def _conserving_K():
    # 1 + 1 -> 2 fusion at threshold-free kinematics, brute-force components
    p_a = onshell(1.0, [0.3, 0.0, 0.0])
    p_b = onshell(1.0, [-0.3, 0.1, 0.0])
    tot = p_a + p_b
    return p_a, p_b, tot


def test_conservation_residual_single_vertex():
    d = single_vertex_diagram(masses_in=(1.0, 1.0), masses_out=(1.0, 1.0))
    p1 = onshell(1.0, [0.2, 0.0, 0.0])
    p2 = onshell(1.0, [-0.2, 0.0, 0.0])
    K = KConfiguration([p1, p2, -p1, -p2])
    res = conservation_residual(d, K, {})
    assert res["v"].euclidean_norm() < 1e-14


def test_conservation_residual_pole_oracle():
    # oracle: sum the components directly at each vertex
    d = pole_diagram()
    rng = np.random.default_rng(5)
    k_a, k_b, k_e, k_f = pole_surface_config(1.0, 1.0, 2.5, 1.0, 4.0, rng)
    K = KConfiguration([k_a, k_b, k_e, k_f])
    q = {0: k_a + k_b}
    res = conservation_residual(d, K, q)
    expected_a = (k_a.as_array() + k_b.as_array()) - q[0].as_array()
    expected_b = (k_e.as_array() + k_f.as_array()) + q[0].as_array()
    assert np.allclose(res["A"].as_array(), expected_a, atol=1e-14)
    assert np.allclose(res["B"].as_array(), expected_b, atol=1e-14)
    assert res["A"].euclidean_norm() < 1e-12
    assert res["B"].euclidean_norm() < 1e-12


def test_conservation_residual_perturbation_and_linearity():
    d = pole_diagram()
    rng = np.random.default_rng(6)
    k_a, k_b, k_e, k_f = pole_surface_config(1.0, 1.0, 2.5, 1.0, 4.0, rng)
    delta = 1e-3
    K = KConfiguration([k_a + FourVector(delta), k_b, k_e, k_f])
    res = conservation_residual(d, K, {0: k_a + k_b})
    assert abs(res["A"].euclidean_norm() - delta) < 1e-12

    # component-wise linearity in (K, q)
    K1 = KConfiguration([k_a, k_b, k_e, k_f])
    K2 = KConfiguration([k_b, k_a, k_f, k_e])
    q1 = {0: FourVector(1.0, 0.1, 0.0, 0.0)}
    q2 = {0: FourVector(0.5, 0.0, 0.2, 0.0)}
    Ksum = KConfiguration([a + b for a, b in zip(K1, K2)])
    qsum = {0: q1[0] + q2[0]}
    r1 = conservation_residual(d, K1, q1)
    r2 = conservation_residual(d, K2, q2)
    rs = conservation_residual(d, Ksum, qsum)
    for v in d.vertices:
        assert np.allclose(rs[v].as_array(), r1[v].as_array() + r2[v].as_array(), atol=1e-12)


def test_missing_internal_assignment_errors():
    d = pole_diagram()
    rng = np.random.default_rng(7)
    K = KConfiguration(pole_surface_config(1.0, 1.0, 2.5, 1.0, 4.0, rng))
    with pytest.raises(ValueError, match="missing momentum"):
        conservation_residual(d, K, {})


class TestPersistence:
    def test_round_trip_triangle(self):
        d = triangle_diagram()
        assert load_diagram(save_diagram(d)) == d

    @pytest.mark.parametrize("fixture", [pole_diagram, single_vertex_diagram, threshold_diagram])
    def test_round_trip_fixtures(self, fixture):
        d = fixture()
        assert load_diagram(save_diagram(d)) == d

    def test_missing_mass(self):
        doc = b'{"vertices": ["A"], "internal": [], "external": [{"vertex": "A", "orientation": "initial"}]}'
        with pytest.raises(DiagramFormatError, match="missing mass"):
            load_diagram(doc)

    def test_non_positive_mass(self):
        doc = b'{"vertices": ["A"], "internal": [], "external": [{"vertex": "A", "mass": 0, "orientation": "initial"}]}'
        with pytest.raises(DiagramFormatError, match="non-positive mass"):
            load_diagram(doc)

    def test_unknown_field(self):
        doc = b'{"vertices": ["A"], "spin": 2}'
        with pytest.raises(DiagramFormatError, match="unknown field"):
            load_diagram(doc)

    def test_kconfig_round_trip_bit_exact(self):
        rng = np.random.default_rng(11)
        K = KConfiguration([FourVector(*rng.normal(size=4)) for _ in range(4)])
        K2 = load_kconfig(save_kconfig(K))
        for a, b in zip(K, K2):
            assert a == b  # exact float equality after the JSON round trip


def test_kinematic_violations():
    d = pole_diagram()
    rng = np.random.default_rng(8)
    K = KConfiguration(pole_surface_config(1.0, 1.0, 2.5, 1.0, 4.0, rng))
    assert kinematic_violations(d, K) == []
    bad_shell = KConfiguration([K[0] + FourVector(0.1), K[1], K[2], K[3]])
    assert any("off shell" in v for v in kinematic_violations(d, bad_shell))
    flipped = KConfiguration([K[0], K[1], K[2], -K[3]])
    msgs = kinematic_violations(d, flipped)
    assert any("final" in v for v in msgs)
