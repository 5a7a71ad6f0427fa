"""Frozen benchmark grid that pins the improvement arithmetic.

The response-time grid and the expected percentages below are fixed
reference data; the tests assert that the report arithmetic reproduces the
expected cells within 0.05 percentage points (the reference rounds
inconsistently, mixing one decimal with quarter points).
"""

TASK_COUNTS = (2, 4, 6, 8, 10)

MEAN_RESPONSES = {
    "randomize": (3.0, 4.0, 7.0, 11.0, 16.0),
    "round_robin": (2.0, 3.0, 6.0, 9.0, 13.0),
    "fuzzy": (1.0, 2.0, 4.0, 7.0, 11.0),
}

EXPECTED_VS_RR = (50.0, 33.3, 33.3, 22.2, 15.4)
EXPECTED_VS_RAND = (66.7, 50.0, 42.9, 36.4, 31.25)

EXPECTED_MEAN_VS_RR = 30.84
EXPECTED_MEAN_VS_RAND = 45.45

TOLERANCE_PP = 0.05
