import sys


def main(argv):
    for line in sys.stdin:
        print(line.strip())


if __name__ == "__main__":
    main(sys.argv)
