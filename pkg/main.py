import sys

from dotenv import load_dotenv

from modules.cli.commands import dispatch

# Carrega variáveis do .env (truncamento, tolerância, logs)
load_dotenv()


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
