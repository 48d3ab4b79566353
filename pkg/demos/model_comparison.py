"""Four follower models against the same leader, side by side.

Every model replays the identical mixed-frequency synthetic leader and
is scored with the shared coordination indexes. The adaptive controller
keeps its maximum error well under the reactive-predictive baseline's.
"""

from mirrorgame.session import compare_models, synthetic_benchmark


def main():
    leader = synthetic_benchmark(seed=0)
    models = ["opc-follower", "afc", "rpc", "hkb-fixed"]
    _, table, extras = compare_models(leader, models)
    print(table)
    print()
    for mode in models:
        print(f"max|error|({mode}) = {extras[mode]['max_error']:.4f}")


if __name__ == "__main__":
    main()
