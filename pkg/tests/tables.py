"""Shared reference data for the evaluation tests.

A held-out-set confusion matrix (rows = gold, columns = predicted) with
its published per-class metrics, and the corpus class distribution used
by the majority-baseline oracle.
"""

CONFUSION_LABELS = (
    "CPQ", "O", "COQ", "C", "CPO", "CO", "PO", "T",
    "OQ", "POQ", "CPOQ", "Q", "CP", "PQ", "CQ",
)

CONFUSION_COUNTS = (
    (7, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (0, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (0, 1, 0, 1, 4, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (1, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 1, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 6, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0),
    (1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0),
    (1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
)

# per class: (recall %, precision %, fallout %, F)
EXPECTED_CLASS_METRICS = {
    "CPQ": (100.00, 63.64, 12.12, 0.78),
    "CPO": (66.67, 100.00, 0.00, 0.80),
    "CPOQ": (100.00, 100.00, 0.00, 1.00),
    "T": (50.00, 100.00, 0.00, 0.67),
    "CP": (100.00, 100.00, 0.00, 1.00),
    "O": (100.00, 60.00, 5.41, 0.75),
    "CO": (66.67, 100.00, 0.00, 0.80),
    "C": (0.00, 0.00, 5.13, 0.00),
    "CQ": (0.00, 100.00, 0.00, 0.00),
    "COQ": (100.00, 100.00, 0.00, 1.00),
    "PO": (50.00, 100.00, 0.00, 0.67),
    "OQ": (66.67, 50.00, 5.41, 0.57),
    "Q": (0.00, 0.00, 2.50, 0.00),
    "POQ": (0.00, 100.00, 0.00, 0.00),
    "PQ": (0.00, 100.00, 0.00, 0.00),
}

# corpus-wide class frequencies (the 393 annotated descriptions)
CLASS_DISTRIBUTION = {
    "CPQ": 64, "CPO": 56, "CPOQ": 46, "T": 42, "CP": 41, "O": 32,
    "CO": 31, "C": 18, "CQ": 14, "COQ": 13, "OQ": 12, "PO": 11,
    "Q": 5, "P": 4, "PQ": 2, "POQ": 2,
}
