from inventory.models import Item


class InventoryService:
    def __init__(self, repository):
        self.repository = repository

    def receive(self, sku, amount):
        item = self.repository.load(sku)
        item.restock(amount)
        self.repository.store(item)
        return item

    def _audit(self, item):
        print(item.sku)


class InventoryRepository:
    def __init__(self):
        self.items = {}

    def load(self, sku):
        return self.items.get(sku) or Item(sku, 0)

    def store(self, item):
        self.items[item.sku] = item
