class Alpha:
    def run(self):
        return helper()


def helper():
    value = 1
    return value
