"""Hong-Ou-Mandel dip on a 50:50 beam splitter, by every backend."""

from lopath.circuits import BS, Circuit, classical_matrix
from lopath.fock import amplitude_fock, amplitude_permanent, enumerate_basis
from lopath.qpath import eval_closed, event_diagram


def main():
    c = Circuit(2, (BS(0),))
    U = classical_matrix(c)
    print(f"{'output':>8} {'permanent':>10} {'fock':>10} {'qpath':>10}")
    for J in enumerate_basis(2, 2):
        probs = [
            abs(amplitude_permanent(U, (1, 1), J)) ** 2,
            abs(amplitude_fock(U, (1, 1), J)) ** 2,
            abs(eval_closed(event_diagram(c, (1, 1), J))) ** 2,
        ]
        print(f"{str(J):>8} " + " ".join(f"{p:10.6f}" for p in probs))


if __name__ == "__main__":
    main()
