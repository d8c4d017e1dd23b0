from inventory.service import InventoryService, InventoryRepository


def build_service():
    repository = InventoryRepository()
    return InventoryService(repository)


def handle_receive(request):
    service = build_service()
    item = service.receive(request["sku"], request["amount"])
    return {"sku": item.sku, "quantity": item.quantity}
