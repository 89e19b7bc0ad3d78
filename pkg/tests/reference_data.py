"""Reference tomography tables used by the golden-replay acceptance checks.

Each table maps a subspace to four ``(value, std)`` expectation pairs, in
the order ``xxx, yyx, yxy, xyy`` for real parts and ``yyy, xxy, xyx, yxx``
for imaginary parts.
"""

# Mitigated run, 1024 shots per experiment.
RE_TABLE = {
    "01": [(0.59, 0.02), (-0.58, 0.02), (-0.57, 0.02), (-0.53, 0.02)],
    "12": [(0.43, 0.02), (-0.43, 0.02), (-0.43, 0.02), (-0.43, 0.02)],
    "02": [(0.34, 0.02), (-0.32, 0.02), (-0.34, 0.02), (-0.32, 0.02)],
}
DIAG = (0.29, 0.36, 0.31)
DIAG_STD = (0.01, 0.02, 0.02)
# Re of <000|rho|111>, <000|rho|222>, <111|rho|222> and their std.
RE_ELEMENTS = (0.282, 0.165, 0.214)
RE_ELEMENTS_STD = (0.006, 0.006, 0.006)
FIDELITY = 0.76
FIDELITY_STD = 0.01

# Independent run with imaginary parts, 512 shots per experiment.
PHASE_RE_TABLE = {
    "01": [(0.69, 0.03), (-0.68, 0.03), (-0.58, 0.03), (-0.67, 0.03)],
    "12": [(0.41, 0.03), (-0.35, 0.03), (-0.36, 0.03), (-0.37, 0.03)],
    "02": [(0.46, 0.03), (-0.47, 0.03), (-0.46, 0.03), (-0.46, 0.03)],
}
PHASE_IM_TABLE = {
    "01": [(0.03, 0.03), (-0.006, 0.034), (-0.006, 0.033), (-0.07, 0.03)],
    "12": [(0.12, 0.03), (-0.13, 0.03), (-0.15, 0.03), (-0.15, 0.03)],
    "02": [(-0.06, 0.03), (0.1, 0.03), (0.16, 0.03), (0.16, 0.03)],
}
PHASE_DIAG = (0.35, 0.29, 0.21)
PHASE_DIAG_STD = (0.02, 0.02, 0.02)
PHASE_ELEMENTS = (complex(0.327, 0.014), complex(0.231, -0.059), complex(0.186, 0.070))
PHI1, PHI2, PHASE_STD = -0.04, 0.25, 0.03
DELTA_DIRECT, DELTA_DIFFERENCE = -0.36, -0.29
