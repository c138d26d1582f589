"""The museum tour: a swap of three room sensors against the planner's answer.

The thieves take the left wing (rooms 10, 9, 8) while the monitor should
believe they took the right wing (rooms 3, 4, 5).  Swapping the three room
pairs works, but alterations need not be bijections, so relabelling only
the left wing is enough.

Run with ``python3 demos/museum_heist.py``.
"""

from deceptiplan.alteration import format_cost, total_cost
from deceptiplan.builtins import builtin_instance, vault_swap_alteration
from deceptiplan.ilp import solve
from deceptiplan.verifier import is_deceptive


def main():
    inst = builtin_instance("green-vault")
    identity = {y: y for y in inst.events}

    swap = identity | vault_swap_alteration()
    print("pairwise swap 3<->10, 4<->9, 5<->8")
    print(f"  deceptive: {is_deceptive(inst, swap).deceptive}, cost {format_cost(total_cost(swap, inst.cost))}")

    result = solve(inst)
    print("planner's choice")
    for y, t in result.alteration.changes().items():
        print(f"  {y} reports as {t}")
    print(f"  deceptive: {is_deceptive(inst, result.alteration).deceptive}, cost {format_cost(result.cost)}")


if __name__ == "__main__":
    main()
