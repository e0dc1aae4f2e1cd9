"""Published reference rejection rates at the 5% level.

Each value was obtained from 10,000 simulated data sets by the original
authors of the test.  Keys are ``(group, row, n)`` and values map a
column (statistic or specified lag order) to the rate.
"""

SAMPLE_SIZES_ONE = (40, 60, 80, 100)
SAMPLE_SIZES_TWO = (40, 60, 80)

# one-sample design; columns T_new, T_BS
TABLE1 = {
    ("I", "size"): {"T_new": (0.061, 0.063, 0.055, 0.054), "T_BS": (0.097, 0.088, 0.079, 0.074)},
    ("I", "power1"): {"T_new": (0.989, 0.999, 1.0, 1.0), "T_BS": (0.994, 0.999, 1.0, 1.0)},
    ("I", "power2"): {"T_new": (1.0, 1.0, 1.0, 1.0), "T_BS": (1.0, 1.0, 1.0, 1.0)},
    ("II", "size"): {"T_new": (0.076, 0.070, 0.070, 0.068), "T_BS": (0.442, 0.533, 0.611, 0.674)},
    ("II", "power1"): {"T_new": (0.242, 0.282, 0.319, 0.35), "T_BS": (0.678, 0.786, 0.858, 0.906)},
    ("II", "power2"): {"T_new": (0.818, 0.989, 0.999, 1.0), "T_BS": (0.934, 1.0, 1.0, 1.0)},
    ("III", "size"): {"T_new": (0.072, 0.071, 0.068, 0.065), "T_BS": (0.929, 0.979, 0.996, 0.999)},
    ("III", "power1"): {"T_new": (0.125, 0.135, 0.146, 0.153), "T_BS": (0.952, 0.989, 0.997, 1.0)},
    ("III", "power2"): {"T_new": (0.635, 0.850, 0.961, 0.992), "T_BS": (0.998, 1.0, 1.0, 1.0)},
    ("IV", "size"): {"T_new": (0.060, 0.063, 0.062, 0.058), "T_BS": (0.998, 1.0, 1.0, 1.0)},
    ("IV", "power1"): {"T_new": (0.084, 0.098, 0.102, 0.098), "T_BS": (0.997, 1.0, 1.0, 1.0)},
    ("IV", "power2"): {"T_new": (0.445, 0.703, 0.867, 0.939), "T_BS": (1.0, 1.0, 1.0, 1.0)},
}

# two-sample design, T_new only; rows keyed by model order M, columns n = 40, 60, 80
TABLE2 = {
    ("size", 1): (0.0866, 0.0891, 0.0773),
    ("size", 2): (0.0767, 0.0758, 0.0696),
    ("size", 3): (0.0627, 0.0651, 0.0607),
    ("power1", 1): (0.1128, 0.1190, 0.1239),
    ("power1", 2): (0.0860, 0.0915, 0.0882),
    ("power1", 3): (0.0642, 0.0734, 0.0735),
    ("power2", 1): (0.3003, 0.4222, 0.6070),
    ("power2", 2): (0.1712, 0.2299, 0.3525),
    ("power2", 3): (0.1103, 0.1594, 0.2369),
}

# Model III (true M = 2) tested with specified M = 0..4; keyed by (row, n)
TABLE3 = {
    ("size", 40): (0.9110, 0.1410, 0.0717, 0.0685, 0.0631),
    ("size", 60): (0.9741, 0.1579, 0.0709, 0.0715, 0.0687),
    ("size", 80): (0.9947, 0.1725, 0.0683, 0.0669, 0.0656),
    ("size", 100): (0.9987, 0.1847, 0.0645, 0.0647, 0.0636),
    ("power1", 40): (0.9371, 0.2178, 0.1245, 0.1202, 0.1064),
    ("power1", 60): (0.9853, 0.2598, 0.1350, 0.1321, 0.1260),
    ("power1", 80): (0.9970, 0.2965, 0.1458, 0.1426, 0.1366),
    ("power1", 100): (0.9993, 0.3232, 0.1532, 0.1510, 0.1482),
    ("power2", 40): (0.9976, 0.7613, 0.6347, 0.5995, 0.5471),
    ("power2", 60): (1.0, 0.9291, 0.8504, 0.8382, 0.8183),
    ("power2", 80): (1.0, 0.9871, 0.9609, 0.9576, 0.9530),
    ("power2", 100): (1.0, 0.9978, 0.9916, 0.9904, 0.9892),
}
