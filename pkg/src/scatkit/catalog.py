"""Standard diagram fixtures used across experiments and tests."""

from __future__ import annotations

from .diagram import Diagram, ExternalLine, InternalLine, ParticleSpec


def single_vertex_diagram(masses_in=(1.0, 1.0), masses_out=(1.0, 1.0)) -> Diagram:
    """Smallest legal diagram: one vertex, no internal lines."""
    ext = [ExternalLine("v", ParticleSpec(m, f"in{i}"), "initial") for i, m in enumerate(masses_in)]
    ext += [ExternalLine("v", ParticleSpec(m, f"out{i}"), "final") for i, m in enumerate(masses_out)]
    return Diagram(["v"], [], ext)


def pole_diagram(
    m_a: float = 1.0,
    m_b: float = 1.0,
    m_c: float = 2.5,
    m_e: float = 1.0,
    m_f: float = 4.0,
) -> Diagram:
    """Single-intermediate-particle diagram: two vertices joined by one line.

    Two initial particles (a, b) meet at vertex A and fuse into the internal
    particle c, which propagates to vertex B where it joins a third initial
    particle e to form the final particle f.  The default masses satisfy both
    fusion thresholds m_c > m_a + m_b and m_f > m_c + m_e, so the
    realizability surface (k_a + k_b)^2 = m_c^2 is nonempty.
    """
    internal = [InternalLine("A", "B", ParticleSpec(m_c, "c"))]
    external = [
        ExternalLine("A", ParticleSpec(m_a, "a"), "initial"),
        ExternalLine("A", ParticleSpec(m_b, "b"), "initial"),
        ExternalLine("B", ParticleSpec(m_e, "e"), "initial"),
        ExternalLine("B", ParticleSpec(m_f, "f"), "final"),
    ]
    return Diagram(["A", "B"], internal, external)


def reversed_pole_diagram(**kw) -> Diagram:
    """Pole fixture with the internal line direction flipped (B -> A).

    With the same external momenta the internal particle would have to carry
    positive energy backward in time, so no realization exists; used to check
    that the displacement direction is a ray rather than a full line.
    """
    d = pole_diagram(**kw)
    line = d.internal[0]
    return Diagram(d.vertices, [InternalLine(line.dst, line.src, line.particle)], d.external)


def triangle_diagram(
    m_int: tuple[float, float, float] = (1.0, 1.0, 1.0),
    m_ab: float = 0.9,
    m_e: float = 1.0,
    m_f1: float = 1.0,
    m_out: float = 0.8,
) -> Diagram:
    """Three vertices, three internal lines, six external lines, one loop.

    A emits internal lines to B and C; B also receives initial particle e and
    emits final f1 plus an internal line to C; C absorbs both internal lines
    and emits the final pair.
    """
    m1, m2, m3 = m_int
    internal = [
        InternalLine("A", "B", ParticleSpec(m1, "q1")),
        InternalLine("B", "C", ParticleSpec(m2, "q2")),
        InternalLine("A", "C", ParticleSpec(m3, "q3")),
    ]
    external = [
        ExternalLine("A", ParticleSpec(m_ab, "a"), "initial"),
        ExternalLine("A", ParticleSpec(m_ab, "b"), "initial"),
        ExternalLine("B", ParticleSpec(m_e, "e"), "initial"),
        ExternalLine("B", ParticleSpec(m_f1, "f1"), "final"),
        ExternalLine("C", ParticleSpec(m_out, "f2"), "final"),
        ExternalLine("C", ParticleSpec(m_out, "f3"), "final"),
    ]
    return Diagram(["A", "B", "C"], internal, external)


def threshold_diagram(m_int: tuple[float, float] = (1.0, 1.0), m_ext: float = 0.9) -> Diagram:
    """Two-to-two process with two parallel internal lines (one loop).

    Realizable exactly when the initial pair's invariant mass equals
    m_int[0] + m_int[1]: the two internal particles then travel together.
    """
    m1, m2 = m_int
    internal = [
        InternalLine("A", "B", ParticleSpec(m1, "q1")),
        InternalLine("A", "B", ParticleSpec(m2, "q2")),
    ]
    external = [
        ExternalLine("A", ParticleSpec(m_ext, "a"), "initial"),
        ExternalLine("A", ParticleSpec(m_ext, "b"), "initial"),
        ExternalLine("B", ParticleSpec(m_ext, "f1"), "final"),
        ExternalLine("B", ParticleSpec(m_ext, "f2"), "final"),
    ]
    return Diagram(["A", "B"], internal, external)
