"""Time-series econometrics library: unit roots, ARDL bounds testing, ECM, diagnostics, FMOLS/CCR."""
