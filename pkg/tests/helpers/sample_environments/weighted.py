weighted = {
    "input": {
        "points": [(1, 0), (2, 1.5), (0.25, 0.5)],
        "weights": [3.0, 2.0, 1.0],
    },
    "expected": {
        # beta -> (value, argmax entry indices) over all three entries
        "solutions": {
            0.0: (0.0, ()),
            0.1: (0.3, (0,)),
            0.5: (1.5, (0,)),
            1.0: (6.0 - (0.5 + 1 / 6 + 1.125), (0, 1, 2)),
        },
        # beta = 1 over the two heaviest entries
        "head_2_at_1": (3.875, (0, 1)),
        # beta = 1 over the entries past the heaviest
        "tail_1_at_1": (2.0 + 0.5 - 0.5 / 1.75, (1, 2)),
    },
}
